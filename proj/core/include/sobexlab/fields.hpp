#pragma once

#include <functional>
#include <string>

#include "sobexlab/geometry.hpp"
#include "sobexlab/point.hpp"

namespace sobexlab::fields {

// Evaluable scalar field with an optional analytic gradient.  When no
// analytic gradient is attached, gradient() falls back to central finite
// differences with a step relative to fd_scale (the local feature size).
struct ScalarField {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Vec(const Point&)> grad;  // may be empty
  double fd_scale = 1.0;

  double operator()(const Point& x) const { return value(x); }
  bool has_analytic_grad() const { return static_cast<bool>(grad); }
  Vec gradient(const Point& x) const;
};

Vec fd_gradient(const std::function<double(const Point&)>& f, const Point& x,
                double h);

// Smooth test families defined on all of R^n.
ScalarField make_const(double c, int n);
ScalarField make_poly(int degree, int n);    // ((x_1+...+x_n)/n)^degree
ScalarField make_trig(double freq, int n);   // sin(freq * (x_1+...+x_n))

// The unbounded-mass counterexample field: 0 on the cube, the linear ramp
// a_k (x_n - 1) on stem k and the constant a_k on head k, with
// a_k = (4^k)^{(n-1)/q}; gradient magnitude a_k on stems, 0 elsewhere.
ScalarField field_thm53(const geometry::MushroomSpec& spec);
// log2 of a_k, for analytic columns at depths where linear doubles overflow.
double thm53_amplitude_log2(const geometry::MushroomSpec& spec, int k);

// Comb rate field: 1 on the lower half-cylinder k, the unit downward ramp
// across the transition band, 0 elsewhere.
ScalarField field_sec6(const geometry::CombSpec& comb, int k);

// Mushroom rate field: 1 on head k, the ramp x_n - 1 on stem k, 0 elsewhere.
ScalarField field_sec7(const geometry::MushroomSpec& spec, int k);

// Parse "const:c" | "poly:d" | "trig:w" | "thm53" | "sec7:k" (mushroom
// context) or "sec6:k" (comb context).
ScalarField parse_field(const std::string& descriptor,
                        const geometry::MushroomSpec& spec);
ScalarField parse_field(const std::string& descriptor,
                        const geometry::CombSpec& comb);

}  // namespace sobexlab::fields
