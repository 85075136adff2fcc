#include <doctest.h>

#include <cmath>

#include "sobexlab/errors.hpp"
#include "sobexlab/maps.hpp"
#include "sobexlab/norms.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;
using namespace sobexlab::maps;

namespace {

// finite-difference determinant of the Cartesian map
double fd_det3(const Reflection& map, const Point& x, double h) {
  double J[3][3];
  for (int j = 0; j < 3; ++j) {
    Point a = x, b = x;
    a[j] -= h;
    b[j] += h;
    const Point ya = apply(map, a), yb = apply(map, b);
    for (int i = 0; i < 3; ++i) J[i][j] = (yb[i] - ya[i]) / (2 * h);
  }
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
         J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

}  // namespace

TEST_CASE("slab reflection") {
  const auto r1 = slab_reflection();
  const Point x{0.3, 0.3, 1.25};
  const Point y = apply(r1, x);
  CHECK(y[0] == doctest::Approx(0.3));
  CHECK(y[1] == doctest::Approx(0.3));
  CHECK(y[2] == doctest::Approx(0.75));
  // involution on the slab
  Point mid{0.3, 0.3, 1.5};
  const Point back = apply(r1, apply(r1, mid));
  CHECK(back[2] == doctest::Approx(1.5));
  CHECK(jacobian(r1, x).abs_det == doctest::Approx(1.0));
  CHECK_THROWS_AS(apply(r1, Point{0.3, 0.3, 2.5}), NumericalError);
}

TEST_CASE("head collar reflection: mapped radius and Jacobian range") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto hr = head_reflection(spec, 1);
  REQUIRE(spec.head_radius(1) == doctest::Approx(0.25));

  Point x{0.25 + 0.3, 0.25, 2.5};  // s = 0.3
  const Point y = apply(hr, x);
  CHECK(y.base_dist(spec.z[0].data()) == doctest::Approx(0.225));
  CHECK(y[2] == doctest::Approx(2.5));

  // |J| = (1/2)(s'/s)^{n-2}: 1/2 at the inner edge, 1/8 at the outer edge
  Point inner{0.25 + 0.25, 0.25, 2.4};
  CHECK(jacobian(hr, inner).abs_det == doctest::Approx(0.5));
  Point outer{0.25 + 0.5, 0.25, 2.4};
  CHECK(jacobian(hr, outer).abs_det == doctest::Approx(0.125));
  CHECK(jacobian(hr, outer).opnorm_bound == doctest::Approx(1.0));
}

TEST_CASE("sampled |J| stays in [1/8, 1/2] and matches finite differences") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 3);
  // The FD oracle needs feature sizes well above the ulp of the ambient
  // coordinates, so stem maps are probed on a fat-stem parameter choice.
  const auto fat = geometry::build_mushroom(3, 1.2, 1, 3);
  const CounterRng rng(5, fnv1a("maps-jac"));
  for (int kind = 0; kind < 2; ++kind) {
    for (int k = 1; k <= 2; ++k) {
      const auto map = kind == 0 ? head_reflection(spec, k)
                                 : stem_reflection(fat, k);
      const double R = map.frame.radius;
      for (int i = 0; i < 2500; ++i) {
        const double s = R * (1.02 + 0.96 * rng.uniform(i, 0));
        const double th = 2 * M_PI * rng.uniform(i, 1);
        const double z =
            map.frame.z0 + (map.frame.z1 - map.frame.z0) *
                               (0.05 + 0.9 * rng.uniform(i, 2));
        Point x{map.frame.axis_center[0] + s * std::cos(th),
                map.frame.axis_center[1] + s * std::sin(th), z};
        const auto jac = jacobian(map, x);
        REQUIRE(jac.abs_det >= 0.125 - 1e-12);
        REQUIRE(jac.abs_det <= 0.5 + 1e-12);
        const double fd = std::abs(fd_det3(map, x, 1e-6 * R));
        REQUIRE(std::abs(fd - jac.abs_det) <= 1e-6 * jac.abs_det);
        // image containment: collar annulus maps into the closed cylinder
        const Point y = apply(map, x);
        const double sp = y.base_dist(map.frame.axis_center.data());
        REQUIRE(sp <= R * (1 + 1e-12));
        REQUIRE(sp >= R / 2 * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("pullback gradient matches finite differences of u o R") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto map = head_reflection(spec, 1);
  auto u = [](const Point& p) {
    return std::sin(p[0]) * p[1] + 0.3 * p[2] * p[2] + p[0] * p[2];
  };
  const Point x{0.25 + 0.33, 0.25 + 0.12, 2.3};
  const Point y = apply(map, x);
  Vec grad_u{std::cos(y[0]) * y[1] + y[2], std::sin(y[0]), 0.6 * y[2] + y[0]};
  const Vec pb = pullback_gradient(map, x, grad_u);
  const double h = 1e-7;
  for (int i = 0; i < 3; ++i) {
    Point a = x, b = x;
    a[i] -= h;
    b[i] += h;
    const double fd = (u(apply(map, b)) - u(apply(map, a))) / (2 * h);
    CHECK(pb[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("change of variables: collar integral equals image integral") {
  const auto spec = geometry::build_mushroom(3, 5, 1, 2);
  const auto map = head_reflection(spec, 1);
  const double R = spec.head_radius(1);
  auto f = [](const Point& p) {
    return 1.0 + p[0] * p[0] + std::sin(3 * p[1]) + p[2];
  };
  norms::QuadratureSpec quad;
  quad.method = norms::QuadMethod::MonteCarlo;
  quad.mc_samples = 400000;
  quad.seed = 99;

  norms::ShellShape collar{spec.z[0], R, 2 * R, 2.0, 3.0, false, false, {}};
  const auto lhs = norms::integrate_shell(
      [&](const Point& x) {
        return f(apply(map, x)) * jacobian(map, x).abs_det;
      },
      collar, 3, quad, fnv1a("cov-lhs"));

  norms::ShellShape image{spec.z[0], R / 2, R, 2.0, 3.0, false, false, {}};
  const auto rhs =
      norms::integrate_shell(f, image, 3, quad, fnv1a("cov-rhs"));

  const double sigma = std::hypot(lhs.stderr_, rhs.stderr_);
  CHECK(std::abs(lhs.value - rhs.value) <= 3 * sigma);
}
