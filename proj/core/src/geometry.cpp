#include "sobexlab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "sobexlab/errors.hpp"
#include "sobexlab/logspace.hpp"

namespace sobexlab::geometry {

double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double sphere_area(int d) {
  return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

bool CylFrame::contains(const Point& x, bool closed_radial,
                        bool closed_axial) const {
  const double s = radial_dist(x);
  const double zn = x.axial();
  const bool rad = closed_radial ? s <= radius : s < radius;
  const bool ax = closed_axial ? (zn >= z0 && zn <= z1) : (zn > z0 && zn < z1);
  return rad && ax;
}

std::string RegionTag::str() const {
  auto subname = [](CollarSub s) {
    switch (s) {
      case CollarSub::DL: return ",DL";
      case CollarSub::DU: return ",DU";
      case CollarSub::Side: return ",Side";
      default: return "";
    }
  };
  switch (kind) {
    case RegionKind::Cube: return "Cube";
    case RegionKind::Stem: return "Stem(" + std::to_string(k) + ")";
    case RegionKind::Head: return "Head(" + std::to_string(k) + ")";
    case RegionKind::StemCollar:
      return "StemCollar(" + std::to_string(k) + subname(sub) + ")";
    case RegionKind::HeadCollar:
      return "HeadCollar(" + std::to_string(k) + subname(sub) + ")";
    case RegionKind::Slab: return "Slab";
    default: return "Outside";
  }
}

RegionTag tag_cube() { return {RegionKind::Cube, 0, CollarSub::None}; }
RegionTag tag_stem(int k) { return {RegionKind::Stem, k, CollarSub::None}; }
RegionTag tag_head(int k) { return {RegionKind::Head, k, CollarSub::None}; }
RegionTag tag_stem_collar(int k, CollarSub sub) {
  return {RegionKind::StemCollar, k, sub};
}
RegionTag tag_head_collar(int k, CollarSub sub) {
  return {RegionKind::HeadCollar, k, sub};
}
RegionTag tag_slab() { return {RegionKind::Slab, 0, CollarSub::None}; }

bool MushroomSpec::in_ambient(const Point& x) const {
  for (int i = 0; i < n - 1; ++i)
    if (x[i] <= 0 || x[i] >= 1) return false;
  return x.axial() > 0 && x.axial() < 3;
}

MushroomSpec build_mushroom(int n, double p, double q, int m) {
  if (n < 3) throw ConfigError("mushroom: n must be >= 3");
  if (q < 1 || q >= n - 1)
    throw ConfigError("mushroom: q must satisfy 1 <= q < n-1");
  if (p <= q) throw ConfigError("mushroom: p must exceed q");
  if (m < 1) throw ConfigError("mushroom: m must be >= 1");

  MushroomSpec spec;
  spec.n = n;
  spec.p = p;
  spec.q = q;
  spec.m = m;
  spec.qstar_nm1 = q * (n - 1) / (n - 1 - q);
  spec.strict_regime = p > spec.qstar_nm1;

  const double r_rate = 2.0 * (1.0 / (n - 1) + p / q);  // r_k = 2^{-r_rate k}
  spec.z.resize(m);
  spec.log2_tilde_r.resize(m);
  spec.log2_r.resize(m);
  spec.tilde_r.resize(m);
  spec.r.resize(m);
  for (int k = 1; k <= m; ++k) {
    // Diagonal-corner placement: Q_k is the low corner of its parent, Q'_k
    // the diagonally opposite subcube, which becomes the next parent.  All
    // coordinates of z_k coincide: 1 - 3*2^{-(k+1)}.
    spec.z[k - 1].assign(n - 1, 1.0 - 3.0 * std::exp2(-(k + 1.0)));
    spec.log2_tilde_r[k - 1] = -(k + 1.0);
    spec.log2_r[k - 1] = -r_rate * k;
    spec.tilde_r[k - 1] = std::exp2(spec.log2_tilde_r[k - 1]);
    spec.r[k - 1] = std::exp2(spec.log2_r[k - 1]);  // may flush to 0
  }
  return spec;
}

namespace {

// Collar sub-region in the normalized collar frame: axial xn in [0,1],
// annulus r/2 < s < r.  Open-set test; cone boundaries fall to Side.
CollarSub collar_sub(double s, double xn, double r) {
  if (xn > 0 && xn < r / 2 && s > r / 2 && s < r - xn) return CollarSub::DL;
  if (xn > 1 - r / 2 && xn < 1 && s > r / 2 && s < xn + r - 1)
    return CollarSub::DU;
  return CollarSub::Side;
}

}  // namespace

RegionTag classify(const MushroomSpec& spec, const Point& x) {
  const double zn = x.axial();
  bool in_base = true;
  for (int i = 0; i < spec.n - 1; ++i)
    if (x[i] <= 0 || x[i] >= 1) in_base = false;

  if (!in_base || zn <= 0 || zn >= 3) return {};

  // Omega pieces first: cube, stems (closed axial [1,2]), heads (open (2,3)).
  if (zn < 1) return tag_cube();  // cube = base x (0,1), nothing else below 1
  if (zn >= 1 && zn <= 2) {
    for (int k = 1; k <= spec.m; ++k)
      if (spec.base_dist(x, k) < spec.stem_radius(k)) return tag_stem(k);
  }
  if (zn > 2 && zn < 3) {
    for (int k = 1; k <= spec.m; ++k)
      if (spec.base_dist(x, k) < spec.head_radius(k)) return tag_head(k);
  }

  // Collars, ascending k.
  if (zn >= 1 && zn <= 2) {
    for (int k = 1; k <= spec.m; ++k) {
      const double s = spec.base_dist(x, k);
      const double rk = spec.stem_radius(k);
      if (s >= rk && s <= 2 * rk)
        return tag_stem_collar(k, collar_sub(s, zn - 1.0, 2 * rk));
    }
    return tag_slab();
  }
  if (zn > 2 && zn < 3) {
    for (int k = 1; k <= spec.m; ++k) {
      const double s = spec.base_dist(x, k);
      const double tk = spec.head_radius(k);
      if (s >= tk && s <= 2 * tk)
        return tag_head_collar(k, collar_sub(s, zn - 2.0, 2 * tk));
    }
  }
  return {};
}

double region_measure_log2(const MushroomSpec& spec, const RegionTag& tag) {
  const int d = spec.n - 1;
  const double lg_ub = std::log2(unit_ball_volume(d));
  if (tag.sub != CollarSub::None)
    throw ConfigError("region_measure: collar sub-regions unsupported");
  switch (tag.kind) {
    case RegionKind::Cube:
      return 0.0;
    case RegionKind::Stem:
      return lg_ub + d * spec.log2_r[tag.k - 1];
    case RegionKind::Head:
      return lg_ub + d * spec.log2_tilde_r[tag.k - 1];
    case RegionKind::StemCollar:
      return lg_ub + d * spec.log2_r[tag.k - 1] + std::log2(std::exp2(d) - 1);
    case RegionKind::HeadCollar:
      return lg_ub + d * spec.log2_tilde_r[tag.k - 1] +
             std::log2(std::exp2(d) - 1);
    case RegionKind::Slab: {
      double discs = 0;
      for (int k = 1; k <= spec.m; ++k)
        discs += unit_ball_volume(d) *
                 std::exp2(d * (spec.log2_r[k - 1] + 1.0));
      return log2_of(1.0 - discs);
    }
    default:
      throw ConfigError("region_measure: unsupported tag " + tag.str());
  }
}

double region_measure(const MushroomSpec& spec, const RegionTag& tag) {
  return exp2_of(region_measure_log2(spec, tag));
}

namespace {

double center_dist(const MushroomSpec& spec, int k1, int k2) {
  double acc = 0;
  for (int i = 0; i < spec.n - 1; ++i) {
    const double d = spec.z[k1 - 1][i] - spec.z[k2 - 1][i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

PlacementReport validate_placement(const MushroomSpec& spec) {
  PlacementReport rep;
  auto fail = [&rep](const std::string& check, int k1, int k2,
                     const std::string& detail) {
    rep.pass = false;
    rep.violations.push_back({check, k1, k2, detail});
  };

  for (int k1 = 1; k1 <= spec.m; ++k1) {
    for (int k2 = k1 + 1; k2 <= spec.m; ++k2) {
      const double dist = center_dist(spec, k1, k2);
      const double head_sum = spec.head_radius(k1) + spec.head_radius(k2);
      if (dist < head_sum)
        fail("head_cylinders_disjoint", k1, k2,
             "dist=" + std::to_string(dist) +
                 " < radii sum=" + std::to_string(head_sum));
      const double stem_sum =
          2 * spec.stem_radius(k1) + 2 * spec.stem_radius(k2);
      if (dist < stem_sum)
        fail("doubled_stems_and_pistons_disjoint", k1, k2,
             "dist=" + std::to_string(dist) +
                 " < doubled radii sum=" + std::to_string(stem_sum));
      if (dist < 2 * spec.head_radius(k1) + 2 * spec.head_radius(k2))
        rep.doubled_head_overlaps.push_back(
            {"doubled_head_cylinders", k1, k2,
             "dist=" + std::to_string(dist)});
    }
  }

  for (int k = 1; k <= spec.m; ++k) {
    const double rr = 2 * spec.stem_radius(k);
    for (int i = 0; i < spec.n - 1; ++i) {
      const double c = spec.z[k - 1][i];
      if (c - rr <= 0 || c + rr >= 1) {
        fail("doubled_stem_balls_in_base_square", k, 0,
             "coordinate " + std::to_string(i));
        break;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Comb domain.
// ---------------------------------------------------------------------------

CombSpec build_comb(int n, int kmax, bool aspect_shrink) {
  if (n < 3) throw ConfigError("comb: n must be >= 3");
  if (kmax < 1) throw ConfigError("comb: kmax must be >= 1");
  CombSpec comb;
  comb.n = n;
  comb.kmax = kmax;
  comb.aspect_shrink = aspect_shrink;
  comb.z.resize(kmax);
  double x1 = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    if (k >= 2) x1 += 30.0 * std::exp2(-static_cast<double>(k));
    comb.z[k - 1].assign(n - 1, 0.0);
    comb.z[k - 1][0] = x1;
  }
  return comb;
}

CombTag classify(const CombSpec& comb, const Point& x) {
  const double zn = x.axial();
  bool in_box = x[0] > 0 && x[0] < 20 && zn > 0 && zn < 1;
  for (int i = 1; i < comb.n - 1; ++i)
    if (x[i] <= 0 || x[i] >= 1) in_box = false;
  if (in_box) return {CombKind::Box, 0};

  if (zn <= 0) {
    for (int k = 1; k <= comb.kmax; ++k) {
      const double h = comb.depth(k);
      if (zn < -h) continue;
      if (x.base_dist(comb.center(k)) <= comb.radius(k)) {
        if (zn <= -h / 2) return {CombKind::HalfCyl, k};
        return {CombKind::Cyl, k};
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Cuspidal domain.
// ---------------------------------------------------------------------------

CuspProfile power_profile(double s) {
  if (s < 1) throw ConfigError("cusp profile: power exponent must be >= 1");
  CuspProfile prof;
  prof.name = "power:" + std::to_string(s);
  prof.eval = [s](double t) { return std::pow(t, s); };
  return prof;
}

CuspProfile tabulated_profile(
    const std::vector<std::pair<double, double>>& knots) {
  if (knots.size() < 2) throw ConfigError("cusp profile: need >= 2 knots");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].first <= knots[i - 1].first)
      throw ConfigError("cusp profile: knot abscissae must increase");
    if (knots[i].second < knots[i - 1].second)
      throw ConfigError("cusp profile: values must be nondecreasing");
  }
  CuspProfile prof;
  prof.name = "table";
  prof.eval = [knots](double t) {
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(
        knots.begin(), knots.end(), t,
        [](double v, const std::pair<double, double>& kn) { return v < kn.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
  };
  return prof;
}

CuspSpec build_cusp(int n, CuspProfile psi) {
  if (n < 2) throw ConfigError("cusp: n must be >= 2");
  constexpr double tol = 1e-12;
  if (std::abs(psi(0.0)) > tol) throw ConfigError("cusp: psi(0) must be 0");
  if (std::abs(psi(1.0) - 1.0) > tol)
    throw ConfigError("cusp: psi(1) must be 1");
  const int grid = 10000;
  double prev = psi(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double v = psi(static_cast<double>(i) / grid);
    if (v < prev - tol) throw ConfigError("cusp: psi must be nondecreasing");
    prev = std::max(prev, v);
  }
  CuspSpec spec;
  spec.n = n;
  spec.psi = std::move(psi);
  spec.ball_center.assign(n, 0.0);
  spec.ball_center[0] = 2.0;
  spec.ball_radius = std::sqrt(2.0);
  return spec;
}

CuspKind classify(const CuspSpec& cusp, const Point& x) {
  // Cusp coordinates: the *first* coordinate is the axis t, the remaining
  // n-1 coordinates are the transversal z.
  const double t = x[0];
  if (t > 0 && t < 1) {
    double zz = 0;
    for (int i = 1; i < cusp.n; ++i) zz += x[i] * x[i];
    if (std::sqrt(zz) < cusp.psi(t)) return CuspKind::CuspPart;
  }
  double bb = 0;
  for (int i = 0; i < cusp.n; ++i) {
    const double d = x[i] - cusp.ball_center[i];
    bb += d * d;
  }
  if (std::sqrt(bb) < cusp.ball_radius) return CuspKind::BallPart;
  return CuspKind::Outside;
}

}  // namespace sobexlab::geometry
