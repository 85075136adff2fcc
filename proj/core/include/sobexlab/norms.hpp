#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sobexlab/fields.hpp"
#include "sobexlab/geometry.hpp"
#include "sobexlab/point.hpp"

namespace sobexlab::norms {

using fields::ScalarField;
using geometry::CombSpec;
using geometry::CuspSpec;
using geometry::MushroomSpec;
using geometry::RegionTag;

enum class QuadMethod { TensorCylindrical, MonteCarlo };

struct QuadratureSpec {
  QuadMethod method = QuadMethod::TensorCylindrical;
  int radial_nodes = 8;    // GL nodes per radial panel
  int axial_nodes = 8;     // GL nodes per axial panel
  int angular_nodes = 16;  // periodic trapezoid points (n = 3)
  int graded_panels = 12;  // panels toward flagged singular circles
  double grading_ratio = 0.5;
  long long mc_samples = 200000;
  std::uint64_t seed = 0x5eed;
  double target_rel_error = 0.01;
  bool estimate_error = true;  // tensor: embedded half-resolution delta
};

std::string method_name(QuadMethod m);
QuadMethod parse_method(const std::string& name);

// One integral: linear value, log2 value (log-sum-exp over quadrature
// terms for nonnegative integrands), and an error estimate (standard error
// for Monte Carlo, half-resolution delta for tensor rules).
struct IntegResult {
  double value = 0;
  double log2_value = 0;
  double stderr_ = 0;
  long long evals = 0;
};

using Integrand = std::function<double(const Point&)>;

// ---------------------------------------------------------------------------
// Shape-level integration (used by the region engine and by tests).
// ---------------------------------------------------------------------------
struct BoxShape {
  Point lo, hi;
};

struct BlockedBand {
  double cx = 0, cy = 0;   // base-plane center (n = 3)
  double r_lo = 0, r_hi = 0;  // blocked where base distance is in [r_lo, r_hi]
};

struct ShellShape {
  std::vector<double> center;  // n-1 coords
  double s0 = 0, s1 = 1;
  double z0 = 0, z1 = 1;
  bool grade_inner = false;  // radial grading toward s0
  bool grade_axial = false;  // axial grading toward both ends
  std::vector<BlockedBand> blocked;  // clipped out of the shape (n = 3)
};

// Conical collar corner region D^L / D^U in physical coordinates: the
// cylinder has outer collar radius r (inner r/2) and unit axial extent
// starting at z_base; `upper` selects D^U.
struct ConeShape {
  std::vector<double> center;
  double r = 1;
  double z_base = 0;
  bool upper = false;
};

// Cusp profile solid {(t, z): t in (0,1), |z| < psi(t)}.
struct ProfileShape {
  const geometry::CuspSpec* cusp = nullptr;
};

IntegResult integrate_box(const Integrand& f, const BoxShape& box,
                          const QuadratureSpec& quad, std::uint64_t stream);
IntegResult integrate_shell(const Integrand& f, const ShellShape& shell, int n,
                            const QuadratureSpec& quad, std::uint64_t stream);
IntegResult integrate_cone(const Integrand& f, const ConeShape& cone, int n,
                           const QuadratureSpec& quad, std::uint64_t stream);
IntegResult integrate_profile(const Integrand& f, const ProfileShape& shape,
                              const QuadratureSpec& quad,
                              std::uint64_t stream);

// ---------------------------------------------------------------------------
// Region-tagged norms on the mushroom ambient.
// ---------------------------------------------------------------------------
struct RegionResult {
  std::string region;
  IntegResult integral;
};

struct NormReport {
  std::string field;
  std::string integrand;  // "lp" or "grad"
  double p = 1;
  std::vector<RegionResult> regions;
  double total = 0;
  double log2_total = 0;   // log-sum-exp combination of region log2 values
  double stderr_total = 0;
  double root = 0;         // total^(1/p)
};

enum class RegionSelect { All, Cube, Stems, Heads, Collars, Slab, Omega };
RegionSelect parse_region_select(const std::string& name);
std::vector<RegionTag> select_regions(const MushroomSpec& spec,
                                      RegionSelect sel);

NormReport lp_norm(const MushroomSpec& spec, const ScalarField& f,
                   const std::vector<RegionTag>& regions, double p,
                   const QuadratureSpec& quad);
NormReport sobolev_seminorm(const MushroomSpec& spec, const ScalarField& f,
                            const std::vector<RegionTag>& regions, double p,
                            const QuadratureSpec& quad);

// Signed integral and domain mean over the Omega regions (cube+stems+heads).
double integral_over_omega(const MushroomSpec& spec, const ScalarField& f,
                           const QuadratureSpec& quad);
double mean_over_omega(const MushroomSpec& spec, const ScalarField& f,
                       const QuadratureSpec& quad);

// Comb-domain norms (box + cylinders of the comb, restricted by tag).
IntegResult comb_lp(const CombSpec& comb, const ScalarField& f, double p,
                    bool gradient, const QuadratureSpec& quad);

// ---------------------------------------------------------------------------
// Poincare quotients.
// ---------------------------------------------------------------------------
struct PoincareResult {
  double quotient = 0;
  double numerator = 0;    // int |f - mean|^p
  double denominator = 0;  // int |grad f|^p
  double mean = 0;
  double diam_pow = 0;  // diam(domain)^p where meaningful, else NaN
};

PoincareResult poincare_quotient(const BoxShape& box, const ScalarField& f,
                                 double p, const QuadratureSpec& quad);
PoincareResult poincare_quotient(const MushroomSpec& spec,
                                 const ScalarField& f, double p,
                                 const QuadratureSpec& quad);
// Cusp quotient over the cusp part (the profile solid); reports diam^p of
// the full domain for the Poincare comparison.
PoincareResult poincare_quotient(const CuspSpec& cusp, const ScalarField& f,
                                 double p, const QuadratureSpec& quad);

// ---------------------------------------------------------------------------
// Hyperplane slice seminorm: int_{x_n = t} |grad f|^q over the slice of the
// ambient cylinder (mushroom) or of the comb.
// ---------------------------------------------------------------------------
IntegResult plane_seminorm(const MushroomSpec& spec, const ScalarField& f,
                           double t, double q, const QuadratureSpec& quad);
IntegResult plane_seminorm(const CombSpec& comb, const ScalarField& f,
                           double t, double q, const QuadratureSpec& quad);

// ---------------------------------------------------------------------------
// Geometric series tails: terms 2^{-a k} for k >= k0.
// ---------------------------------------------------------------------------
struct SeriesTail {
  bool convergent = false;
  double sum = 0;       // infinity when divergent
  double log2_sum = 0;  // exact in log2 space
};
SeriesTail series_tail(double a, int k0);

}  // namespace sobexlab::norms
