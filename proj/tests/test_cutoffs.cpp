#include <doctest.h>

#include <cmath>

#include "sobexlab/cutoffs.hpp"
#include "sobexlab/errors.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;
using namespace sobexlab::cutoffs;

namespace {

CollarCoords sample_collar(const CounterRng& rng, int i, double r) {
  CollarCoords c;
  c.r = r;
  c.s = r / 2 + (r / 2) * rng.uniform(i, 0);
  c.xn = rng.uniform(i, 1);
  c.theta = 2 * M_PI * rng.uniform(i, 2);
  return c;
}

}  // namespace

TEST_CASE("Li/Lo boundary values and branch samples") {
  CHECK(eval_Li({0.25, 0.5, 0.5}) == doctest::Approx(1.0));   // inner lateral
  CHECK(eval_Li({0.5, 0.5, 0.5}) == doctest::Approx(0.0));    // outer lateral
  CHECK(eval_Li({0.5, 0.1, 0.5}) == doctest::Approx(0.0));    // bottom annulus
  // DL branch: xn = 0.1, s - r/2 = 0.1 with r = 0.5
  CHECK(eval_Li({0.35, 0.1, 0.5}) == doctest::Approx(0.5));

  CHECK(eval_Lo({0.25, 0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(eval_Lo({0.5, 0.5, 0.5}) == doctest::Approx(1.0));
  // DL branch: xn = 0.1, s - r/2 = 0.3 with r = 0.9
  CHECK(eval_Lo({0.75, 0.1, 0.9}) == doctest::Approx(0.75));

  CHECK(eval_L1(1.0) == doctest::Approx(1.0));
  CHECK(eval_L1(2.0) == doctest::Approx(0.0));
  CHECK(eval_L1(1.25) == doctest::Approx(0.75));
  CHECK_THROWS_AS(eval_L1(0.5), NumericalError);

  CHECK(eval_Li({0.25, 0.0, 0.5}) == doctest::Approx(0.0));  // corner circle
  CHECK_THROWS_AS(eval_Li({0.6, 0.5, 0.5}), NumericalError); // outside collar
}

TEST_CASE("partition of unity and range on random samples") {
  const CounterRng rng(7, fnv1a("cutoff-pou"));
  for (int i = 0; i < 100000; ++i) {
    const double r = 0.05 + 0.9 * rng.uniform(i, 7);
    const auto c = sample_collar(rng, i, r);
    const double li = eval_Li(c);
    const double lo = eval_Lo(c);
    REQUIRE(li >= 0.0);
    REQUIRE(li <= 1.0);
    REQUIRE(lo >= 0.0);
    REQUIRE(lo <= 1.0);
    REQUIRE(std::abs(li + lo - 1.0) <= 1e-12);
  }
}

TEST_CASE("gradients: branch values and envelope with C = 2") {
  const double r = 0.5;
  SUBCASE("side region radial slope is 2/r") {
    const CollarCoords c{0.35, 0.5, r};
    const auto g = grad_Li_local(c);
    CHECK(std::abs(g.d_s) == doctest::Approx(2.0 / r));
    CHECK(g.d_xn == doctest::Approx(0.0));
    const auto cart = grad_Li(c, 3);
    CHECK(cart.norm() == doctest::Approx(2.0 / r));
  }
  SUBCASE("DL at xn = s - r/2 = t has |dLi/ds| = 1/(4t)") {
    const double t = 0.05;
    const CollarCoords c{r / 2 + t, t, r};
    CHECK(branch_of(c) == CollarBranch::DL);
    const auto g = grad_Li_local(c);
    CHECK(std::abs(g.d_s) == doctest::Approx(1.0 / (4 * t)));
  }
  SUBCASE("corner circle evaluation is an error") {
    CHECK_THROWS_AS(grad_Li_local({r / 2, 0.0, r}), NumericalError);
    CHECK_THROWS_AS(grad_Lo_local({r / 2, 1.0, r}), NumericalError);
  }
  SUBCASE("envelope at 1e4 samples per subregion") {
    const CounterRng rng(11, fnv1a("cutoff-envelope"));
    int seen_dl = 0, seen_du = 0, seen_side = 0;
    for (int i = 0; seen_dl < 10000 || seen_du < 10000 || seen_side < 10000;
         ++i) {
      REQUIRE(i < 4000000);
      const auto c = sample_collar(rng, i, r);
      const auto b = branch_of(c);
      if (b == CollarBranch::Corner) continue;
      if (b == CollarBranch::DL && seen_dl >= 10000) continue;
      if (b == CollarBranch::DU && seen_du >= 10000) continue;
      if (b == CollarBranch::Side && seen_side >= 10000) continue;
      const double bound = grad_bound(c);
      CHECK(grad_Li_local(c).norm() <= bound * (1 + 1e-12));
      CHECK(grad_Lo_local(c).norm() <= bound * (1 + 1e-12));
      (b == CollarBranch::DL ? seen_dl
       : b == CollarBranch::DU ? seen_du
                               : seen_side)++;
    }
  }
}

TEST_CASE("analytic gradients match finite differences away from interfaces") {
  const CounterRng rng(13, fnv1a("cutoff-fd"));
  const double r = 0.5;
  int checked = 0;
  for (int i = 0; checked < 2000; ++i) {
    REQUIRE(i < 200000);
    const auto c = sample_collar(rng, i, r);
    // margin to every branch interface and collar boundary
    const double d = c.s - r / 2;
    double margin = std::min({d, r - c.s, c.xn, 1 - c.xn});
    margin = std::min(margin, std::abs(d - c.xn));        // DL cone face
    margin = std::min(margin, std::abs(d - (1 - c.xn)));  // DU cone face
    margin = std::min(margin, std::abs(c.xn - r / 2));
    margin = std::min(margin, std::abs((1 - c.xn) - r / 2));
    if (margin < 1e-3) continue;
    ++checked;
    const double h = 1e-6 * margin;
    auto fd = [&](auto eval) {
      CollarCoords cp = c, cm = c;
      cp.s += h;
      cm.s -= h;
      const double ds = (eval(cp) - eval(cm)) / (2 * h);
      cp = cm = c;
      cp.xn += h;
      cm.xn -= h;
      const double dxn = (eval(cp) - eval(cm)) / (2 * h);
      return CollarGrad{ds, dxn};
    };
    const auto gi = grad_Li_local(c);
    const auto fi = fd([](const CollarCoords& cc) { return eval_Li(cc); });
    CHECK(std::abs(gi.d_s - fi.d_s) <=
          1e-6 * std::max(1.0, std::abs(gi.d_s)));
    CHECK(std::abs(gi.d_xn - fi.d_xn) <=
          1e-6 * std::max(1.0, std::abs(gi.d_xn)));
    const auto go = grad_Lo_local(c);
    const auto fo = fd([](const CollarCoords& cc) { return eval_Lo(cc); });
    CHECK(std::abs(go.d_s - fo.d_s) <=
          1e-6 * std::max(1.0, std::abs(go.d_s)));
    CHECK(std::abs(go.d_xn - fo.d_xn) <=
          1e-6 * std::max(1.0, std::abs(go.d_xn)));
  }
}

TEST_CASE("boundary traces of the cut-off pair") {
  for (double xn : {0.1, 0.3, 0.7, 0.9}) {
    CHECK(eval_Li({0.25, xn, 0.5}) == doctest::Approx(1.0));
    CHECK(eval_Lo({0.25, xn, 0.5}) == doctest::Approx(0.0));
    CHECK(eval_Li({0.5, xn, 0.5}) == doctest::Approx(0.0));
    CHECK(eval_Lo({0.5, xn, 0.5}) == doctest::Approx(1.0));
  }
  for (double s : {0.26, 0.35, 0.49}) {
    CHECK(eval_Li({s, 0.0, 0.5}) == doctest::Approx(0.0));
    CHECK(eval_Li({s, 1.0, 0.5}) == doctest::Approx(0.0));
    CHECK(eval_Lo({s, 0.0, 0.5}) == doctest::Approx(1.0));
    CHECK(eval_Lo({s, 1.0, 0.5}) == doctest::Approx(1.0));
  }
}

TEST_CASE("values are independent of theta") {
  const CollarCoords a{0.4, 0.6, 0.6, 0.0};
  const CollarCoords b{0.4, 0.6, 0.6, 2.1};
  CHECK(eval_Li(a) == eval_Li(b));
  CHECK(grad_Li(a, 3).norm() == doctest::Approx(grad_Li(b, 3).norm()));
}
