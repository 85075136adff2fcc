#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "sobexlab/fields.hpp"
#include "sobexlab/geometry.hpp"
#include "sobexlab/norms.hpp"

namespace sobexlab::experiments {

using geometry::CombSpec;
using geometry::MushroomSpec;
using norms::QuadratureSpec;

// Least-squares slope of log2(value) against k; residual is the max
// absolute deviation from the fit.  Throws on fewer than 3 rows or a
// degenerate abscissa.
struct FitResult {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
  int k_lo = 0, k_hi = 0;
};
FitResult fit_exponent(const std::vector<std::pair<int, double>>& rows);

// One row of the experiment tables: a (k, quantity) pair with the columns
// of the CSV contract.  Missing columns stay NaN.
struct RateCell {
  int k = 0;
  std::string quantity;
  double analytic_log2 = std::numeric_limits<double>::quiet_NaN();
  double quad_log2 = std::numeric_limits<double>::quiet_NaN();
  double formula_log2 = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RateTable {
  std::string name;
  std::vector<std::pair<std::string, std::string>> meta;  // key/value
  // deque: cell() hands out references that must survive later insertions
  std::deque<RateCell> cells;
  std::vector<std::pair<std::string, FitResult>> fits;
  std::vector<Check> checks;

  bool all_pass() const;
  const RateCell* find(int k, const std::string& quantity) const;
  RateCell& cell(int k, const std::string& quantity);  // inserts if missing
};

// Exponent helpers shared by the estimate-chain and the rate experiments.
double sing_exponent(double p, double q);              // pq/(p-q)
double ratio_exponent(int n, double p, double q);      // (n-1)/q*_{n-1} - (n-1)/p
double qstar_threshold(int n, double q);               // q(n-1)/(n-1-q)

// Partial sums of the unbounded-mass counterexample: gradient energy stays
// bounded while the L^q mass diverges geometrically.
RateTable homog_counterexample_report(const MushroomSpec& spec,
                                      const std::vector<int>& mlist,
                                      const QuadratureSpec& quad);

// Extension-operator boundedness sweep: W^{1,q}/W^{1,p} ratios for a smooth
// family across truncation levels, plus the four per-k collar contribution
// families with their geometric tails.
RateTable operator_norm_sweep(const MushroomSpec& spec,
                              const std::vector<std::string>& family,
                              const std::vector<int>& mlist,
                              const QuadratureSpec& quad);

RateTable rate_section7(const MushroomSpec& spec, int kmax,
                        const QuadratureSpec& quad);

RateTable rate_section6(const CombSpec& comb, int kmax, double p, double q,
                        const QuadratureSpec& quad);

}  // namespace sobexlab::experiments
