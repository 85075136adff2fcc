#include <doctest.h>

#include <cmath>

#include "sobexlab/errors.hpp"
#include "sobexlab/extension.hpp"
#include "sobexlab/logspace.hpp"
#include "sobexlab/norms.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;
using namespace sobexlab::norms;

namespace {

QuadratureSpec tensor_quad() {
  QuadratureSpec q;
  q.method = QuadMethod::TensorCylindrical;
  return q;
}

QuadratureSpec mc_quad(long long n = 200000, std::uint64_t seed = 41) {
  QuadratureSpec q;
  q.method = QuadMethod::MonteCarlo;
  q.mc_samples = n;
  q.seed = seed;
  return q;
}

}  // namespace

TEST_CASE("unit volumes through the shape engine") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto one = fields::make_const(1.0, 3);
  const auto rep =
      lp_norm(spec, one, {geometry::tag_cube()}, 2.0, tensor_quad());
  CHECK(rep.total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.root == doctest::Approx(1.0).epsilon(1e-12));

  // cylinder measure through a head region
  const auto head =
      lp_norm(spec, one, {geometry::tag_head(1)}, 1.0, tensor_quad());
  CHECK(head.total == doctest::Approx(M_PI / 16).epsilon(1e-10));
}

TEST_CASE("thm53 closed forms: per-head mass and per-stem gradient energy") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 3);
  const auto u = fields::field_thm53(spec);

  const auto mass =
      lp_norm(spec, u, {geometry::tag_head(2)}, spec.q, tensor_quad());
  CHECK(mass.total == doctest::Approx(4 * M_PI).epsilon(1e-10));

  for (int k = 1; k <= 3; ++k) {
    const auto grad = sobolev_seminorm(spec, u, {geometry::tag_stem(k)},
                                       spec.p, tensor_quad());
    CHECK(grad.total ==
          doctest::Approx(M_PI * std::exp2(-2.0 * k)).epsilon(1e-10));
    CHECK(grad.log2_total ==
          doctest::Approx(std::log2(M_PI) - 2.0 * k).epsilon(1e-10));
  }
}

TEST_CASE("seminorm basics") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  fields::ScalarField xn;
  xn.name = "xn";
  xn.value = [](const Point& x) { return x.axial(); };
  xn.grad = [](const Point&) { return Vec{0, 0, 1}; };
  CHECK(sobolev_seminorm(spec, xn, {geometry::tag_cube()}, 2.0, tensor_quad())
            .total == doctest::Approx(1.0).epsilon(1e-12));

  const auto u7 = fields::field_sec7(spec, 1);
  const auto semi = sobolev_seminorm(spec, u7, {geometry::tag_stem(1)}, 2.0,
                                     tensor_quad());
  CHECK(semi.total ==
        doctest::Approx(geometry::region_measure(spec, geometry::tag_stem(1)))
            .epsilon(1e-10));

  const auto c = fields::make_const(4.0, 3);
  CHECK(sobolev_seminorm(spec, c, {geometry::tag_cube()}, 2.0, tensor_quad())
            .total == doctest::Approx(0.0));
}

TEST_CASE("norm report bookkeeping: totals, log2 consistency, monotonicity") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 4);
  const auto u = fields::make_poly(2, 3);
  const auto all = select_regions(spec, RegionSelect::All);
  const auto rep = lp_norm(spec, u, all, 2.0, tensor_quad());

  double sum = 0;
  for (const auto& r : rep.regions) sum += r.integral.value;
  CHECK(rep.total == doctest::Approx(sum).epsilon(1e-14));
  CHECK(std::abs(rep.log2_total - std::log2(rep.total)) <= 1e-10);

  const auto omega = lp_norm(
      spec, u, select_regions(spec, RegionSelect::Omega), 2.0, tensor_quad());
  const auto cube = lp_norm(
      spec, u, select_regions(spec, RegionSelect::Cube), 2.0, tensor_quad());
  CHECK(cube.total <= omega.total);
  CHECK(omega.total <= rep.total);
}

TEST_CASE("tensor and Monte Carlo engines agree within 3 sigma") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto u = fields::make_trig(1.1, 3);
  for (const auto& tag :
       {geometry::tag_cube(), geometry::tag_head(1), geometry::tag_slab(),
        geometry::tag_head_collar(1)}) {
    const auto t = lp_norm(spec, u, {tag}, 2.0, tensor_quad());
    const auto m = lp_norm(spec, u, {tag}, 2.0, mc_quad(300000));
    const double sigma = t.stderr_total + m.stderr_total;
    INFO(tag.str());
    CHECK(std::abs(t.total - m.total) <= 3 * sigma + 1e-12);
  }
}

TEST_CASE("poincare quotient on the unit cube: 1/12 for f = x1, p = 2") {
  BoxShape box;
  box.lo = Point::zero(3);
  box.hi = Point{1, 1, 1};
  fields::ScalarField f;
  f.name = "x1";
  f.value = [](const Point& x) { return x[0]; };
  f.grad = [](const Point&) { return Vec{1, 0, 0}; };
  const auto res = poincare_quotient(box, f, 2.0, tensor_quad());
  CHECK(res.quotient == doctest::Approx(1.0 / 12).epsilon(0.005));
  CHECK(res.mean == doctest::Approx(0.5).epsilon(1e-10));

  // homogeneity: Q(c g) = Q(g)
  fields::ScalarField g = f;
  g.value = [](const Point& x) { return 7.0 * x[0]; };
  g.grad = [](const Point&) { return Vec{7, 0, 0}; };
  const auto res7 = poincare_quotient(box, g, 2.0, tensor_quad());
  CHECK(res7.quotient == doctest::Approx(res.quotient).epsilon(1e-10));
}

TEST_CASE("poincare quotient on the cusp part: closed-form 1D reduction") {
  const auto cusp = geometry::build_cusp(3, geometry::power_profile(2));
  fields::ScalarField f;
  f.name = "t";
  f.value = [](const Point& x) { return x[0]; };
  f.grad = [](const Point&) { return Vec{1, 0, 0}; };
  const auto res = poincare_quotient(cusp, f, 2.0, tensor_quad());
  // weight psi^2 = t^4: mean 5/6, quotient (1/252)/(1/5) = 5/252
  CHECK(res.mean == doctest::Approx(5.0 / 6).epsilon(1e-6));
  CHECK(res.quotient == doctest::Approx(5.0 / 252).epsilon(0.01));
  CHECK(res.quotient <= res.diam_pow);
  CHECK(res.diam_pow == doctest::Approx(std::pow(2 + std::sqrt(2.0), 2)));

  const auto c = fields::make_const(1.0, 3);
  CHECK_THROWS_AS(poincare_quotient(cusp, c, 2.0, tensor_quad()),
                  NumericalError);
}

TEST_CASE("plane seminorm") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  SUBCASE("zero-gradient slice") {
    const auto c = fields::make_const(2.0, 3);
    const auto r = plane_seminorm(spec, c, 0.5, 1.0, tensor_quad());
    CHECK(r.value == doctest::Approx(0.0));
  }
  SUBCASE("comb transition band slice: constant gradient over the disc") {
    const auto comb = geometry::build_comb(3, 4, false);
    for (int k : {1, 2, 3}) {
      const auto u = fields::field_sec6(comb, k);
      for (double q : {1.0, 1.5}) {
        const auto r = plane_seminorm(comb, u, -0.25, q, tensor_quad());
        const double expect =
            std::pow(2.0, q) * M_PI * std::pow(comb.radius(k), 2);
        CHECK(r.value == doctest::Approx(expect).epsilon(0.01));
      }
    }
  }
  SUBCASE("extension slice: tensor vs Monte Carlo within 3 sigma") {
    const auto u = fields::make_poly(2, 3);
    const auto Eu = extension::extend(spec, u);
    const auto t = plane_seminorm(spec, Eu, 1.5, 1.0, tensor_quad());
    const auto m = plane_seminorm(spec, Eu, 1.5, 1.0, mc_quad(400000));
    CHECK(std::abs(t.value - m.value) <=
          3 * (t.stderr_ + m.stderr_) + 1e-12);
  }
  SUBCASE("out-of-range slice errors") {
    const auto c = fields::make_const(1.0, 3);
    CHECK_THROWS_AS(plane_seminorm(spec, c, 3.5, 1.0, tensor_quad()),
                    NumericalError);
  }
}

TEST_CASE("series tails") {
  SUBCASE("closed form vs brute-force partial sums in log space") {
    // (n,p,q) = (3,5,1): exponent n - pq/(p-q) = 1.75
    const double a = 1.75;
    const auto tail = series_tail(a, 2);
    REQUIRE(tail.convergent);
    Log2Acc acc;
    for (int k = 2; k < 10000 + 2; ++k) acc.add(-a * k);
    CHECK(std::abs(std::exp2(acc.log2_total() - tail.log2_sum) - 1.0) <=
          1e-10);
  }
  SUBCASE("boundary and divergent rates") {
    CHECK_FALSE(series_tail(0.0, 1).convergent);
    CHECK_FALSE(series_tail(-0.5, 1).convergent);
  }
  SUBCASE("q* threshold equivalence on a parameter grid") {
    int count = 0;
    for (int n : {3, 4, 5}) {
      for (double q : {1.0, 1.3, 1.8, 2.3}) {
        if (q >= n - 1) continue;
        for (double mult : {0.7, 0.9, 1.0, 1.2, 2.0}) {
          const double thr = q * (n - 1) / (n - 1 - q);
          const double p = thr * mult;
          if (p <= q) continue;
          ++count;
          const double beta = p * q / (p - q);
          const double rate =
              2.0 * (1.0 / (n - 1) + p / q) * (n - 1 - beta);
          if (mult == 1.0) {
            // exact threshold: the rate collapses to fp noise around 0
            CHECK(std::abs(rate) <= 1e-9);
          } else {
            CHECK(series_tail(rate, 1).convergent == (p > thr));
          }
        }
      }
    }
    CHECK(count >= 50);
  }
}

TEST_CASE("graded quadrature of the collar corner singularity converges") {
  // int_{D^L} ((s - r/2)^2 + xn^2)^{-q/2} with q = 1 < n - 1
  ConeShape cone;
  cone.center = {0.0, 0.0};
  cone.r = 1.0;
  const Integrand f = [](const Point& x) {
    const double s = std::hypot(x[0], x[1]);
    return 1.0 / std::hypot(s - 0.5, x[2]);
  };
  double prev = 0, cur = 0;
  for (int panels : {6, 10, 14, 18}) {
    QuadratureSpec q = tensor_quad();
    q.graded_panels = panels;
    q.estimate_error = false;
    prev = cur;
    cur = integrate_cone(f, cone, 3, q, fnv1a("sing")).value;
  }
  CHECK(std::abs(cur - prev) <= 0.005 * cur);
}

TEST_CASE("non-finite integrand aborts with location") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 1);
  fields::ScalarField bad;
  bad.name = "bad";
  bad.value = [](const Point& x) {
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  bad.grad = [](const Point&) { return Vec{0, 0, 0}; };
  CHECK_THROWS_AS(
      lp_norm(spec, bad, {geometry::tag_cube()}, 2.0, tensor_quad()),
      NumericalError);
}

TEST_CASE("determinism: identical seeds give identical values") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto u = fields::make_poly(2, 3);
  const auto all = select_regions(spec, RegionSelect::All);
  const auto a = lp_norm(spec, u, all, 2.0, mc_quad(50000, 77));
  const auto b = lp_norm(spec, u, all, 2.0, mc_quad(50000, 77));
  CHECK(a.total == b.total);
  for (std::size_t i = 0; i < a.regions.size(); ++i)
    CHECK(a.regions[i].integral.value == b.regions[i].integral.value);
}
