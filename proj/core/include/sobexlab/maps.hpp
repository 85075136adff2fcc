#pragma once

#include "sobexlab/geometry.hpp"
#include "sobexlab/point.hpp"

namespace sobexlab::maps {

enum class MapKind { SlabR1, HeadR, StemR };

// One of the three reflection families.  Collar maps act on the closed
// annulus R <= s <= 2R around the cylinder axis, sending s to
// -s/2 + (3/2) R; values on the closure are the continuous limits of the
// open-annulus formula.
struct Reflection {
  MapKind kind = MapKind::SlabR1;
  int k = 0;                  // cylinder index for collar maps
  geometry::CylFrame frame;   // collar annulus: frame.radius = inner radius R
};

Reflection slab_reflection();
Reflection head_reflection(const geometry::MushroomSpec& spec, int k);
Reflection stem_reflection(const geometry::MushroomSpec& spec, int k);

Point apply(const Reflection& map, const Point& x);

struct JacobianInfo {
  double abs_det = 1;       // |J|; exactly (1/2)(s'/s)^{n-2} for collar maps
  double opnorm_bound = 1;  // upper bound for |D map|
};
JacobianInfo jacobian(const Reflection& map, const Point& x);

// Differential applied to a downstream gradient: returns (D map)^T g, used
// by the chain rule for u o map.  For collar maps the matrix is symmetric:
// -1/2 on the radial direction, s'/s on the tangential block, 1 axially.
Vec pullback_gradient(const Reflection& map, const Point& x, const Vec& g);

}  // namespace sobexlab::maps
