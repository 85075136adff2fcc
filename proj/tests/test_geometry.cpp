#include <doctest.h>

#include <cmath>

#include "sobexlab/errors.hpp"
#include "sobexlab/geometry.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;
using namespace sobexlab::geometry;

namespace {

// Independent membership oracle built from the raw cylinder/cube predicates,
// bypassing classify's precedence machinery.
bool oracle_in_omega(const MushroomSpec& spec, const Point& x) {
  bool base = true;
  for (int i = 0; i < spec.n - 1; ++i)
    if (x[i] <= 0 || x[i] >= 1) base = false;
  if (!base) return false;
  const double zn = x.axial();
  if (zn > 0 && zn < 1) return true;
  for (int k = 1; k <= spec.m; ++k) {
    const double s = x.base_dist(spec.z[k - 1].data());
    if (s < spec.stem_radius(k) && zn >= 1 && zn <= 2) return true;
    if (s < spec.head_radius(k) && zn > 2 && zn < 3) return true;
  }
  return false;
}

double dist_to_boundary_features(const MushroomSpec& spec, const Point& x) {
  // distance to the nearest membership-defining surface, as a crude guard
  double d = std::abs(x.axial() - 1.0);
  d = std::min(d, std::abs(x.axial() - 2.0));
  d = std::min(d, std::abs(x.axial()));
  d = std::min(d, std::abs(x.axial() - 3.0));
  for (int i = 0; i < spec.n - 1; ++i) {
    d = std::min(d, std::abs(x[i]));
    d = std::min(d, std::abs(x[i] - 1.0));
  }
  for (int k = 1; k <= spec.m; ++k) {
    const double s = x.base_dist(spec.z[k - 1].data());
    d = std::min(d, std::abs(s - spec.stem_radius(k)));
    d = std::min(d, std::abs(s - spec.head_radius(k)));
  }
  return d;
}

}  // namespace

TEST_CASE("mushroom radii match the dyadic formula") {
  const auto spec = build_mushroom(3, 5, 1, 4);
  CHECK(spec.tilde_r[0] == doctest::Approx(0.25).epsilon(1e-15));
  // r_1 = (4^-1)^(1/2 + 5) = 2^-11
  CHECK(spec.r[0] == doctest::Approx(std::exp2(-11)).epsilon(1e-15));
  CHECK(spec.log2_r[0] == doctest::Approx(-11.0).epsilon(1e-15));

  for (int k = 1; k <= spec.m; ++k) {
    // independent log2 recomputation
    const double lg_tilde = -(k + 1.0);
    const double lg_r = (1.0 / (spec.n - 1) + spec.p / spec.q) * (-2.0 * k);
    CHECK(std::abs(spec.log2_tilde_r[k - 1] - lg_tilde) <=
          1e-14 * std::abs(lg_tilde));
    CHECK(std::abs(spec.log2_r[k - 1] - lg_r) <= 1e-14 * std::abs(lg_r));
    // linear vs log2 cross-check
    const double lin = std::pow(std::exp2(-2.0 * k),
                                1.0 / (spec.n - 1) + spec.p / spec.q);
    CHECK(spec.r[k - 1] == doctest::Approx(lin).epsilon(1e-14));
    CHECK(spec.r[k - 1] < spec.tilde_r[k - 1]);
  }
}

TEST_CASE("diagonal placement pins the first center at (1/4, 1/4)") {
  const auto spec = build_mushroom(3, 5, 1, 3);
  CHECK(spec.z[0][0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(spec.z[0][1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(spec.z[1][0] == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_mushroom(2, 5, 1, 1), ConfigError);
  CHECK_THROWS_AS(build_mushroom(3, 5, 2, 1), ConfigError);   // q >= n-1
  CHECK_THROWS_AS(build_mushroom(3, 0.5, 1, 1), ConfigError); // p <= q
  CHECK_THROWS_AS(build_mushroom(3, 5, 1, 0), ConfigError);
  CHECK(build_mushroom(3, 5, 1, 2).strict_regime);
  CHECK_FALSE(build_mushroom(3, 1.5, 1, 2).strict_regime);  // p <= q* = 2
}

TEST_CASE("classify: named examples") {
  const auto spec = build_mushroom(3, 5, 1, 2);
  CHECK(classify(spec, {0.25, 0.25, 2.5}) == tag_head(1));
  CHECK(classify(spec, {0.5, 0.5, 0.5}) == tag_cube());

  // far from every head: brute-force distance check over k <= m
  const Point far{0.9, 0.1, 2.9};
  for (int k = 1; k <= spec.m; ++k)
    REQUIRE(far.base_dist(spec.z[k - 1].data()) > 2 * spec.head_radius(k));
  CHECK(classify(spec, far).kind == RegionKind::Outside);

  // stem and collar tags
  const Point on_stem{0.25, 0.25, 1.5};
  CHECK(classify(spec, on_stem) == tag_stem(1));
  Point collar = on_stem;
  collar[0] += 1.5 * spec.stem_radius(1);
  CHECK(classify(spec, collar).kind == RegionKind::StemCollar);
  CHECK(classify(spec, collar).k == 1);
  CHECK(classify(spec, {0.5, 0.5, 1.5}) == tag_slab());
}

TEST_CASE("classify agrees with the raw membership oracle") {
  const auto spec = build_mushroom(3, 5, 1, 6);
  const CounterRng rng(2024, fnv1a("geometry-oracle"));
  int checked = 0;
  for (int i = 0; i < 100000; ++i) {
    Point x{rng.uniform(i, 0), rng.uniform(i, 1), 3 * rng.uniform(i, 2)};
    if (dist_to_boundary_features(spec, x) < 1e-12) continue;
    ++checked;
    const auto tag = classify(spec, x);
    CHECK(tag.in_omega() == oracle_in_omega(spec, x));
  }
  CHECK(checked > 99000);
}

TEST_CASE("region measures: closed forms") {
  const auto spec = build_mushroom(3, 5, 1, 3);
  CHECK(region_measure(spec, tag_cube()) == doctest::Approx(1.0));
  CHECK(region_measure(spec, tag_head(1)) ==
        doctest::Approx(M_PI / 16).epsilon(1e-12));
  CHECK(region_measure(spec, tag_stem(2)) ==
        doctest::Approx(M_PI * std::exp2(-44)).epsilon(1e-12));
  CHECK(region_measure_log2(spec, tag_stem(2)) ==
        doctest::Approx(std::log2(M_PI) - 44).epsilon(1e-14));
  CHECK_THROWS_AS(region_measure(spec, RegionTag{}), ConfigError);
  CHECK_THROWS_AS(
      region_measure(spec, tag_stem_collar(1, CollarSub::DL)), ConfigError);
}

TEST_CASE("placement validation") {
  SUBCASE("reference spec passes, deep truncations too") {
    for (int m : {1, 12, 30}) {
      const auto rep = validate_placement(build_mushroom(3, 5, 1, m));
      CHECK(rep.pass);
      CHECK(rep.violations.empty());
    }
  }
  SUBCASE("doubled head overlaps of consecutive k are reported") {
    const auto rep = validate_placement(build_mushroom(3, 5, 1, 4));
    CHECK_FALSE(rep.doubled_head_overlaps.empty());
    CHECK(rep.doubled_head_overlaps.front().k1 == 1);
    CHECK(rep.doubled_head_overlaps.front().k2 == 2);
  }
  SUBCASE("coincident centers violate head disjointness") {
    auto spec = build_mushroom(3, 5, 1, 2);
    spec.z[1] = spec.z[0];
    const auto rep = validate_placement(spec);
    CHECK_FALSE(rep.pass);
    REQUIRE_FALSE(rep.violations.empty());
    CHECK(rep.violations.front().k1 == 1);
    CHECK(rep.violations.front().k2 == 2);
  }
  SUBCASE("grid of admissible parameters") {
    for (int n : {3, 4}) {
      for (double q = 1.0; q < n - 1; q += 0.5) {
        for (double mult : {1.1, 2.0, 5.0}) {
          const double p = mult * q * (n - 1) / (n - 1 - q);
          const auto rep = validate_placement(build_mushroom(n, p, q, 10));
          CHECK(rep.pass);
        }
      }
    }
  }
}

TEST_CASE("comb construction") {
  const auto comb = build_comb(3, 6, false);
  CHECK(comb.z[1][0] == doctest::Approx(8.5).epsilon(1e-15));
  CHECK(comb.z[1][1] == doctest::Approx(0.0));
  CHECK(classify(comb, {10, 0.5, 0.5}).kind == CombKind::Box);
  CHECK(classify(comb, {1, 0, -0.75}) == CombTag{CombKind::HalfCyl, 1});
  CHECK(classify(comb, {1, 0, -0.25}) == CombTag{CombKind::Cyl, 1});
  CHECK(classify(comb, {5, 0, -0.5}).kind == CombKind::Outside);

  // consecutive gaps dominate the radius sums
  for (int k = 1; k < comb.kmax; ++k) {
    const double gap = comb.z[k][0] - comb.z[k - 1][0];
    CHECK(gap == doctest::Approx(30 * std::exp2(-(k + 1.0))));
    CHECK(gap > comb.radius(k) + comb.radius(k + 1));
  }
}

TEST_CASE("cusp domain membership") {
  const auto cusp = build_cusp(3, power_profile(2));
  CHECK(classify(cusp, {0.5, 0.2, 0}) == CuspKind::CuspPart);
  CHECK(classify(cusp, {0.5, 0.3, 0}) == CuspKind::Outside);
  CHECK(classify(cusp, {2, 0, 1}) == CuspKind::BallPart);
  CHECK(cusp.diameter() == doctest::Approx(2 + std::sqrt(2.0)));

  const auto cone = build_cusp(3, power_profile(1));
  // |z| = t lies on the boundary of the open cusp part
  CHECK(classify(cone, {0.4, 0.4, 0}) == CuspKind::Outside);

  CHECK_THROWS_AS(power_profile(0.5), ConfigError);
  CHECK_THROWS_AS(
      build_cusp(3, tabulated_profile({{0, 0}, {0.5, 0.2}, {1, 0.9}})),
      ConfigError);  // psi(1) != 1
  const auto tab = build_cusp(
      3, tabulated_profile({{0, 0}, {0.25, 0.1}, {0.5, 0.3}, {1, 1}}));
  CHECK(tab.psi(0.375) == doctest::Approx(0.2));
}
