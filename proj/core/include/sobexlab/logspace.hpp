#pragma once

#include <cmath>
#include <limits>

namespace sobexlab {

// log2-space arithmetic for nonnegative quantities.  Radii, measures and
// norm contributions shrink like 2^{-a k}; the log2 field stays exact long
// after the linear double has flushed to zero.

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log2_of(double x) { return x > 0 ? std::log2(x) : kNegInf; }

inline double exp2_of(double lg) {
  return lg == kNegInf ? 0.0 : std::exp2(lg);
}

// log2(2^a + 2^b), stable for any spread of magnitudes.
inline double log2_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

// log2(2^a - 2^b); requires a >= b.
inline double log2_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (a == b) return kNegInf;
  return a + std::log2(1.0 - std::exp2(b - a));
}

// Streaming log-sum-exp accumulator in base 2.
class Log2Acc {
 public:
  void add(double lg) { total_ = log2_add(total_, lg); }
  void add_linear(double x) {
    if (x > 0) add(std::log2(x));
  }
  double log2_total() const { return total_; }
  double linear_total() const { return exp2_of(total_); }

 private:
  double total_ = kNegInf;
};

}  // namespace sobexlab
