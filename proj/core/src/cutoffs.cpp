#include "sobexlab/cutoffs.hpp"

#include <cmath>
#include <string>

#include "sobexlab/errors.hpp"

namespace sobexlab::cutoffs {

namespace {

void check_in_collar(const CollarCoords& c) {
  if (!(c.r > 0) || c.r > 1)
    throw NumericalError("collar: outer radius must be in (0, 1]");
  if (c.s < c.r / 2 || c.s > c.r || c.xn < 0 || c.xn > 1)
    throw NumericalError("collar: coordinates outside the closed collar (s=" +
                         std::to_string(c.s) + ", xn=" + std::to_string(c.xn) +
                         ", r=" + std::to_string(c.r) + ")");
}

bool on_corner(const CollarCoords& c) {
  return c.s == c.r / 2 && (c.xn == 0 || c.xn == 1);
}

// Closed cones; the value branches of the piecewise definition.
bool in_closed_DL(const CollarCoords& c) {
  return c.xn <= c.r / 2 && c.s <= c.r - c.xn;
}
bool in_closed_DU(const CollarCoords& c) {
  return 1 - c.xn <= c.r / 2 && c.s <= c.xn + c.r - 1;
}

}  // namespace

CollarBranch branch_of(const CollarCoords& c) {
  check_in_collar(c);
  if (on_corner(c)) return CollarBranch::Corner;
  if (c.xn > 0 && c.xn < c.r / 2 && c.s > c.r / 2 && c.s < c.r - c.xn)
    return CollarBranch::DL;
  if (c.xn > 1 - c.r / 2 && c.xn < 1 && c.s > c.r / 2 && c.s < c.xn + c.r - 1)
    return CollarBranch::DU;
  return CollarBranch::Side;
}

double eval_Li(const CollarCoords& c) {
  check_in_collar(c);
  if (on_corner(c)) return 0.0;
  const double d = c.s - c.r / 2;
  if (in_closed_DL(c)) return c.xn / (c.xn + d);
  if (in_closed_DU(c)) return (1 - c.xn) / ((1 - c.xn) + d);
  return -2.0 / c.r * c.s + 2.0;
}

double eval_Lo(const CollarCoords& c) {
  check_in_collar(c);
  if (on_corner(c)) return 0.0;
  const double d = c.s - c.r / 2;
  if (in_closed_DL(c)) return d / (c.xn + d);
  if (in_closed_DU(c)) return d / ((1 - c.xn) + d);
  return 2.0 / c.r * c.s - 1.0;
}

double eval_L1(double xn_physical) {
  if (xn_physical < 1 || xn_physical > 2)
    throw NumericalError("L1: axial coordinate outside [1,2]");
  return 2.0 - xn_physical;
}

double CollarGrad::norm() const { return std::hypot(d_s, d_xn); }

CollarGrad grad_Li_local(const CollarCoords& c) {
  switch (branch_of(c)) {
    case CollarBranch::Corner:
      throw NumericalError("grad Li: evaluation on a corner circle");
    case CollarBranch::DL: {
      const double d = c.s - c.r / 2;
      const double den = (c.xn + d) * (c.xn + d);
      return {-c.xn / den, d / den};
    }
    case CollarBranch::DU: {
      const double d = c.s - c.r / 2;
      const double a = 1 - c.xn;
      const double den = (a + d) * (a + d);
      return {-a / den, -d / den};
    }
    default:
      return {-2.0 / c.r, 0.0};
  }
}

CollarGrad grad_Lo_local(const CollarCoords& c) {
  switch (branch_of(c)) {
    case CollarBranch::Corner:
      throw NumericalError("grad Lo: evaluation on a corner circle");
    case CollarBranch::DL: {
      const double d = c.s - c.r / 2;
      const double den = (c.xn + d) * (c.xn + d);
      return {c.xn / den, -d / den};
    }
    case CollarBranch::DU: {
      const double d = c.s - c.r / 2;
      const double a = 1 - c.xn;
      const double den = (a + d) * (a + d);
      return {a / den, d / den};
    }
    default:
      return {2.0 / c.r, 0.0};
  }
}

namespace {

Vec embed(const CollarGrad& g, const CollarCoords& c, int n) {
  Vec v = Vec::zero(n);
  v[0] = g.d_s * std::cos(c.theta);
  v[1] = g.d_s * std::sin(c.theta);
  v[n - 1] = g.d_xn;
  return v;
}

}  // namespace

Vec grad_Li(const CollarCoords& c, int n) {
  return embed(grad_Li_local(c), c, n);
}

Vec grad_Lo(const CollarCoords& c, int n) {
  return embed(grad_Lo_local(c), c, n);
}

double grad_bound(const CollarCoords& c) {
  const double d = c.s - c.r / 2;
  switch (branch_of(c)) {
    case CollarBranch::DL:
      return 2.0 / std::hypot(d, c.xn);
    case CollarBranch::DU:
      return 2.0 / std::hypot(d, 1 - c.xn);
    default:
      return 2.0 / c.r;
  }
}

}  // namespace sobexlab::cutoffs
