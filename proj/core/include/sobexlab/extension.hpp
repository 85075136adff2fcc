#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sobexlab/fields.hpp"
#include "sobexlab/geometry.hpp"
#include "sobexlab/maps.hpp"
#include "sobexlab/point.hpp"

namespace sobexlab::extension {

using fields::ScalarField;
using geometry::MushroomSpec;
using geometry::RegionTag;

// The piecewise extension evaluator on the ambient cylinder: u on the
// domain, L1 (u o R1) on the slab, Li (u o HeadR) on head collars,
// L1 Lo (u o R1) + Li (u o StemR) on stem collars, 0 elsewhere.  Immutable;
// evaluations are pure.
class ExtensionField {
 public:
  ExtensionField(MushroomSpec spec, ScalarField u);

  // Classify-dispatched evaluation; throws outside the ambient cylinder.
  double value(const Point& x) const;
  // A.e. gradient; throws on corner circles and outside the ambient.
  Vec gradient(const Point& x) const;

  // Branch formula for a prescribed tag, without classification.  Used for
  // the per-region estimate chain, where each branch is integrated over its
  // full parametrized shell.
  double value_as(const RegionTag& tag, const Point& x) const;
  Vec gradient_as(const RegionTag& tag, const Point& x) const;

  const MushroomSpec& spec() const { return spec_; }
  const ScalarField& u() const { return u_; }

 private:
  MushroomSpec spec_;
  ScalarField u_;
  maps::Reflection slab_map_;
  std::vector<maps::Reflection> head_maps_;  // per k
  std::vector<maps::Reflection> stem_maps_;
};

// ScalarField wrapper around a shared evaluator.
ScalarField extend(const MushroomSpec& spec, const ScalarField& u);

// T(u) = E(u - mean) + mean; restriction to the domain is u itself.
ScalarField homogenize(const MushroomSpec& spec, const ScalarField& u,
                       double mean);

// ---------------------------------------------------------------------------
// Interface-jump diagnostics.
// ---------------------------------------------------------------------------
enum class Face {
  StemLateral,      // s = r_k
  StemCollarOuter,  // s = 2 r_k
  CubeTop,          // x_n = 1
  HeadBottom,       // x_n = 2, r_k < s < tilde_r_k
  HeadLateral,      // s = tilde_r_k
  HeadCollarOuter,  // s = 2 tilde_r_k
};

Face parse_face(const std::string& name);
std::string face_name(Face face);

struct TraceJumpReport {
  double sup_jump = 0;   // sup over samples of the extrapolated jump
  double lq_mean = 0;    // (mean |jump|^q)^{1/q}
  int samples = 0;
  double eps_min = 0;    // smallest one-sided offset used
};

// Samples one-sided limits at offsets eps in {1e-3..1e-6} of the local
// feature size and Richardson-extrapolates the difference to eps -> 0.
TraceJumpReport trace_jump(const MushroomSpec& spec, const ScalarField& u,
                           Face face, int k, double q, int samples = 64);

}  // namespace sobexlab::extension
