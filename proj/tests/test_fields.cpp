#include <doctest.h>

#include <cmath>

#include "sobexlab/errors.hpp"
#include "sobexlab/fields.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;
using namespace sobexlab::fields;

TEST_CASE("thm53 field: branch values and gradient") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 3);
  const auto u = field_thm53(spec);
  CHECK(u.value({0.5, 0.5, 0.5}) == doctest::Approx(0.0));
  // stem 2 at x_n = 1.5: (4^2)^2 * 0.5 = 128
  Point on_stem2{spec.z[1][0], spec.z[1][1], 1.5};
  CHECK(u.value(on_stem2) == doctest::Approx(128.0));
  CHECK(u.gradient(on_stem2).norm() == doctest::Approx(256.0));
  // head 1 constant (4^1)^2 = 16, zero gradient
  Point on_head1{0.25, 0.25, 2.5};
  CHECK(u.value(on_head1) == doctest::Approx(16.0));
  CHECK(u.gradient(on_head1).norm() == doctest::Approx(0.0));
  CHECK(thm53_amplitude_log2(spec, 2) == doctest::Approx(8.0));
}

TEST_CASE("sec6 field: ramp over the transition band") {
  const auto comb = geometry::build_comb(3, 4, false);
  const auto u = field_sec6(comb, 2);
  CHECK(u.value({10, 0.5, 0.5}) == doctest::Approx(0.0));      // box
  CHECK(u.value({8.5, 0, -0.75}) == doctest::Approx(1.0));     // half cylinder
  CHECK(u.value({8.5, 0, -0.25}) == doctest::Approx(0.5));     // band midpoint
  CHECK(u.value({1, 0, -0.25}) == doctest::Approx(0.0));       // other cylinder
  const Vec g = u.gradient({8.5, 0, -0.25});
  CHECK(g[2] == doctest::Approx(-2.0));
  CHECK(g[0] == doctest::Approx(0.0));
}

TEST_CASE("sec7 field: head plateau and stem ramp") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 3);
  const auto u = field_sec7(spec, 2);
  CHECK(u.value({spec.z[1][0], spec.z[1][1], 2.5}) == doctest::Approx(1.0));
  CHECK(u.value({spec.z[1][0], spec.z[1][1], 1.5}) == doctest::Approx(0.5));
  CHECK(u.value({0.5, 0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(u.value({0.25, 0.25, 2.5}) == doctest::Approx(0.0));  // head 1
  CHECK(u.gradient({spec.z[1][0], spec.z[1][1], 1.5})[2] ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(field_sec7(spec, 9), ConfigError);
}

TEST_CASE("smooth families: analytic gradients match finite differences") {
  const int n = 3;
  const CounterRng rng(3, fnv1a("fields-fd"));
  const auto fields = {make_poly(2, n), make_poly(3, n), make_trig(1.7, n),
                       make_const(2.5, n)};
  for (const auto& f : fields) {
    for (int i = 0; i < 1000; ++i) {
      Point x{rng.uniform(i, 0), rng.uniform(i, 1), 3 * rng.uniform(i, 2)};
      const Vec a = f.gradient(x);
      const Vec fd = fd_gradient(f.value, x, 1e-6);
      for (int c = 0; c < n; ++c)
        CHECK(std::abs(a[c] - fd[c]) <= 1e-6 * std::max(1.0, std::abs(a[c])));
    }
  }
}

TEST_CASE("field descriptor parsing") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  CHECK(parse_field("const:2", spec).value({0, 0, 0}) == doctest::Approx(2.0));
  CHECK(parse_field("poly:2", spec).name == "poly:2");
  CHECK(parse_field("thm53", spec).name == "thm53");
  CHECK(parse_field("sec7:1", spec).name == "sec7:1");
  CHECK_THROWS_AS(parse_field("nope", spec), ConfigError);
  CHECK_THROWS_AS(parse_field("poly:x", spec), ConfigError);

  const auto comb = geometry::build_comb(3, 3, false);
  CHECK(parse_field("sec6:2", comb).name == "sec6:2");
  CHECK_THROWS_AS(parse_field("thm53", comb), ConfigError);
}
