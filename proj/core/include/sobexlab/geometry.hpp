#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sobexlab/point.hpp"

namespace sobexlab::geometry {

// Volume of the unit ball in R^d and surface area of S^{d-1}.
double unit_ball_volume(int d);
double sphere_area(int d);

// ---------------------------------------------------------------------------
// Cylinder frame: a ball in the first n-1 coordinates times an axial interval.
// ---------------------------------------------------------------------------
struct CylFrame {
  std::vector<double> axis_center;  // n-1 coordinates
  double radius = 0;
  double z0 = 0, z1 = 0;  // axial interval, z0 < z1

  double radial_dist(const Point& x) const {
    return x.base_dist(axis_center.data());
  }
  bool contains(const Point& x, bool closed_radial, bool closed_axial) const;
};

// ---------------------------------------------------------------------------
// Region tags for the mushroom domain and its ambient cylinder.
// ---------------------------------------------------------------------------
enum class RegionKind { Cube, Stem, Head, StemCollar, HeadCollar, Slab, Outside };
enum class CollarSub { None, DL, DU, Side };

struct RegionTag {
  RegionKind kind = RegionKind::Outside;
  int k = 0;  // 1-based cylinder index, 0 when unused
  CollarSub sub = CollarSub::None;

  bool in_omega() const {
    return kind == RegionKind::Cube || kind == RegionKind::Stem ||
           kind == RegionKind::Head;
  }
  bool is_collar() const {
    return kind == RegionKind::StemCollar || kind == RegionKind::HeadCollar;
  }
  std::string str() const;

  friend bool operator==(const RegionTag& a, const RegionTag& b) {
    return a.kind == b.kind && a.k == b.k && a.sub == b.sub;
  }
  // Equality ignoring the collar sub-tag (same extension branch).
  bool same_region(const RegionTag& o) const {
    return kind == o.kind && k == o.k;
  }
};

RegionTag tag_cube();
RegionTag tag_stem(int k);
RegionTag tag_head(int k);
RegionTag tag_stem_collar(int k, CollarSub sub = CollarSub::None);
RegionTag tag_head_collar(int k, CollarSub sub = CollarSub::None);
RegionTag tag_slab();

// ---------------------------------------------------------------------------
// Mushroom domain: unit cube, thin stems on [1,2], wider heads on (2,3).
// ---------------------------------------------------------------------------
struct MushroomSpec {
  int n = 3;
  double p = 5.0;
  double q = 1.0;
  int m = 1;

  // q(n-1)/(n-1-q); the bounded-extension regime needs p strictly above it.
  double qstar_nm1 = 0;
  bool strict_regime = true;

  // Derived per k = 1..m (index k-1).  Linear radii may flush to zero for
  // very deep k; the log2 fields are then authoritative.
  std::vector<std::vector<double>> z;  // centers, each n-1 coords
  std::vector<double> log2_tilde_r;    // -(k+1)
  std::vector<double> log2_r;          // -2k (1/(n-1) + p/q)
  std::vector<double> tilde_r;
  std::vector<double> r;

  // Harmonized heights: stems on [1,2], heads on (2,3), ambient (0,3).
  static constexpr double stem_z0 = 1.0, stem_z1 = 2.0;
  static constexpr double head_z0 = 2.0, head_z1 = 3.0;

  const double* center(int k) const { return z[k - 1].data(); }
  double head_radius(int k) const { return tilde_r[k - 1]; }
  double stem_radius(int k) const { return r[k - 1]; }

  double base_dist(const Point& x, int k) const {
    return x.base_dist(center(k));
  }
  // Point inside the ambient cylinder C = (0,1)^{n-1} x (0,3)?
  bool in_ambient(const Point& x) const;
};

// Throws ConfigError on parameter-range violations (n < 3, q >= n-1, p <= q,
// m < 1).  Sets strict_regime=false (a warning, not an error) when
// p <= q(n-1)/(n-1-q).
MushroomSpec build_mushroom(int n, double p, double q, int m);

// Total deterministic classification.  Boundary precedence:
// Omega regions (Cube > Stem > Head) > collars (ascending k) > Slab > Outside.
RegionTag classify(const MushroomSpec& spec, const Point& x);

// n-volume of a region in linear and log2 form.  Supported tags: Cube,
// Stem(k), Head(k), full collars (sub = None) and Slab; anything else throws.
double region_measure(const MushroomSpec& spec, const RegionTag& tag);
double region_measure_log2(const MushroomSpec& spec, const RegionTag& tag);

// ---------------------------------------------------------------------------
// Placement validation.
// ---------------------------------------------------------------------------
struct PlacementIssue {
  std::string check;
  int k1 = 0, k2 = 0;
  std::string detail;
};

struct PlacementReport {
  // Required checks: head cylinders pairwise disjoint; doubled stem
  // cylinders and piston domains pairwise disjoint; doubled stem balls
  // inside the open base square.
  bool pass = true;
  std::vector<PlacementIssue> violations;
  // Informational: pairs whose *doubled* head cylinders intersect.  With
  // radii 2^{-k} confined to the unit square this is unavoidable for
  // consecutive k when n <= 4 (the sum of areas already exceeds 1), so it
  // is reported separately rather than failing the placement.
  std::vector<PlacementIssue> doubled_head_overlaps;
};

PlacementReport validate_placement(const MushroomSpec& spec);

// ---------------------------------------------------------------------------
// Comb domain of the rate experiments: box [0,20]x[0,1]^{n-1} with
// cylinders hanging below the x_n = 0 face.
// ---------------------------------------------------------------------------
struct CombSpec {
  int n = 3;
  int kmax = 1;
  bool aspect_shrink = false;

  std::vector<std::vector<double>> z;  // centers on the base surface

  double radius(int k) const { return std::exp2(-(k + 1.0)); }
  // Axial depth of cylinder k: 1 in the base construction; the
  // aspect_shrink variant shortens it to 2^{-(k+1)/2} so the width/height
  // ratio still tends to zero with heights shrinking as well.
  double depth(int k) const {
    return aspect_shrink ? std::exp2(-(k + 1.0) / 2.0) : 1.0;
  }
  const double* center(int k) const { return z[k - 1].data(); }
};

CombSpec build_comb(int n, int kmax, bool aspect_shrink);

enum class CombKind { Box, Cyl, HalfCyl, Outside };
struct CombTag {
  CombKind kind = CombKind::Outside;
  int k = 0;
  friend bool operator==(const CombTag&, const CombTag&) = default;
};
CombTag classify(const CombSpec& comb, const Point& x);

// ---------------------------------------------------------------------------
// Outward cuspidal domain: profile solid over (0,1) plus the anchor ball.
// ---------------------------------------------------------------------------
struct CuspProfile {
  std::string name;                     // "power:s" or "table"
  std::function<double(double)> eval;   // psi(t) on [0,1]
  double operator()(double t) const { return eval(t); }
};

CuspProfile power_profile(double s);  // psi(t) = t^s, s >= 1
CuspProfile tabulated_profile(const std::vector<std::pair<double, double>>& knots);

struct CuspSpec {
  int n = 2;
  CuspProfile psi;
  std::vector<double> ball_center;  // (2, 0, ..., 0)
  double ball_radius = 0;           // sqrt(2)

  // sup distance between points of the domain: 2 + sqrt(2) for any valid
  // profile (origin limit point to the far side of the ball).
  double diameter() const { return 2.0 + ball_radius; }
};

// Validates psi(0)=0, psi(1)=1, nondecreasing on a dense grid; throws
// ConfigError otherwise.
CuspSpec build_cusp(int n, CuspProfile psi);

enum class CuspKind { CuspPart, BallPart, Outside };
CuspKind classify(const CuspSpec& cusp, const Point& x);

}  // namespace sobexlab::geometry
