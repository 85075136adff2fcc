#pragma once

#include "sobexlab/point.hpp"

namespace sobexlab::cutoffs {

// Coordinates in the normalized collar frame: annulus r/2 <= s <= r times
// axial [0,1].  The cut-off formulas depend only on (s, xn, r); theta enters
// only when a Cartesian embedding of the gradient is requested.
struct CollarCoords {
  double s = 0;
  double xn = 0;
  double r = 1;  // outer collar radius; inner radius is r/2
  double theta = 0;
};

enum class CollarBranch { Side, DL, DU, Corner };

// Branch used for gradient dispatch: open cones DL/DU, the corner circles,
// and Side everywhere else (including cone boundaries, where the piecewise
// values agree and the gradient is defined a.e.).
CollarBranch branch_of(const CollarCoords& c);

// Inner cut-off: 1 on {s=r/2}x(0,1), 0 on {s=r} and on the end annuli.
double eval_Li(const CollarCoords& c);
// Outer cut-off: the complement; Li + Lo == 1 on the collar interior.
double eval_Lo(const CollarCoords& c);

// Slab cut-off on the physical frame: 2 - xn for xn in [1,2].
double eval_L1(double xn_physical);

// Local gradient (d/ds, d/dxn); angular components vanish identically.
struct CollarGrad {
  double d_s = 0;
  double d_xn = 0;
  double norm() const;
};
CollarGrad grad_Li_local(const CollarCoords& c);
CollarGrad grad_Lo_local(const CollarCoords& c);

// Cartesian embedding at angle theta in the (x1,x2)-plane; length n.
Vec grad_Li(const CollarCoords& c, int n);
Vec grad_Lo(const CollarCoords& c, int n);

// Explicit gradient envelope with constant C = 2: 2/r on the side region,
// 2/sqrt((s-r/2)^2 + xn^2) on DL, 2/sqrt((s-r/2)^2 + (1-xn)^2) on DU.
double grad_bound(const CollarCoords& c);

}  // namespace sobexlab::cutoffs
