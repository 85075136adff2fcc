#include "sobexlab/maps.hpp"

#include <cmath>
#include <string>

#include "sobexlab/errors.hpp"

namespace sobexlab::maps {

using geometry::MushroomSpec;

Reflection slab_reflection() { return {MapKind::SlabR1, 0, {}}; }

Reflection head_reflection(const MushroomSpec& spec, int k) {
  Reflection m;
  m.kind = MapKind::HeadR;
  m.k = k;
  m.frame = {spec.z[k - 1], spec.head_radius(k), MushroomSpec::head_z0,
             MushroomSpec::head_z1};
  return m;
}

Reflection stem_reflection(const MushroomSpec& spec, int k) {
  Reflection m;
  m.kind = MapKind::StemR;
  m.k = k;
  m.frame = {spec.z[k - 1], spec.stem_radius(k), MushroomSpec::stem_z0,
             MushroomSpec::stem_z1};
  return m;
}

namespace {

// R1 is an involution pairing the slab with the cube; both sides are
// admissible so compositions stay evaluable.
void check_slab_domain(const Point& x) {
  const double zn = x.axial();
  if (zn < 0 || zn > 2)
    throw NumericalError("R1: axial coordinate outside [0,2]");
}

double check_collar_domain(const Reflection& map, const Point& x) {
  const double s = map.frame.radial_dist(x);
  const double R = map.frame.radius;
  const double zn = x.axial();
  if (s < R || s > 2 * R || zn < map.frame.z0 || zn > map.frame.z1)
    throw NumericalError("collar reflection: point outside the annulus of k=" +
                         std::to_string(map.k));
  return s;
}

}  // namespace

Point apply(const Reflection& map, const Point& x) {
  if (map.kind == MapKind::SlabR1) {
    check_slab_domain(x);
    Point y = x;
    y.set_axial(2.0 - x.axial());
    return y;
  }
  const double s = check_collar_domain(map, x);
  const double sp = -s / 2 + 1.5 * map.frame.radius;
  Point y = x;
  const double scale = sp / s;
  for (int i = 0; i < x.dim() - 1; ++i)
    y[i] = map.frame.axis_center[i] + scale * (x[i] - map.frame.axis_center[i]);
  return y;
}

JacobianInfo jacobian(const Reflection& map, const Point& x) {
  if (map.kind == MapKind::SlabR1) {
    check_slab_domain(x);
    return {1.0, 1.0};
  }
  const double s = check_collar_domain(map, x);
  const double sp = -s / 2 + 1.5 * map.frame.radius;
  const int n = x.dim();
  // Cylindrical volume element: |J| = |ds'/ds| (s'/s)^{n-2}.  Singular
  // values of the differential are 1/2 (radial), s'/s <= 1 (tangential,
  // n-2 fold) and 1 (axial), so 1 bounds the operator norm.
  return {0.5 * std::pow(sp / s, n - 2), 1.0};
}

Vec pullback_gradient(const Reflection& map, const Point& x, const Vec& g) {
  const int n = x.dim();
  Vec out = Vec::zero(n);
  if (map.kind == MapKind::SlabR1) {
    check_slab_domain(x);
    for (int i = 0; i < n - 1; ++i) out[i] = g[i];
    out[n - 1] = -g[n - 1];
    return out;
  }
  const double s = check_collar_domain(map, x);
  const double sp = -s / 2 + 1.5 * map.frame.radius;
  // radial unit vector in the base plane
  double ur[kMaxDim];
  for (int i = 0; i < n - 1; ++i)
    ur[i] = (x[i] - map.frame.axis_center[i]) / s;
  double gdotu = 0;
  for (int i = 0; i < n - 1; ++i) gdotu += g[i] * ur[i];
  const double tang = sp / s;
  for (int i = 0; i < n - 1; ++i)
    out[i] = -0.5 * gdotu * ur[i] + tang * (g[i] - gdotu * ur[i]);
  out[n - 1] = g[n - 1];
  return out;
}

}  // namespace sobexlab::maps
