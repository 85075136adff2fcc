#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>

namespace sobexlab {

inline constexpr int kMaxDim = 8;

// Fixed-capacity point/vector in R^n, n <= kMaxDim.  Value type, no heap.
// The last coordinate is the distinguished axial coordinate x_n; the
// projection onto the first n-1 coordinates is `base()` access.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> xs) {
    assert(static_cast<int>(xs.size()) <= kMaxDim);
    for (double v : xs) v_[n_++] = v;
  }
  static Point zero(int n) {
    Point p;
    p.n_ = n;
    return p;
  }

  int dim() const { return n_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }
  double axial() const { return v_[n_ - 1]; }
  void set_axial(double z) { v_[n_ - 1] = z; }

  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }

  // Euclidean distance of the base projection (first n-1 coords) to a
  // center given as n-1 values.
  double base_dist(const double* center) const {
    double acc = 0;
    for (int i = 0; i < n_ - 1; ++i) {
      const double d = v_[i] - center[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }

  double norm() const {
    double acc = 0;
    for (int i = 0; i < n_; ++i) acc += v_[i] * v_[i];
    return std::sqrt(acc);
  }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Point& operator*=(double a) {
    for (int i = 0; i < n_; ++i) v_[i] *= a;
    return *this;
  }
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double a, Point p) { return p *= a; }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) {
      if (i) s += ", ";
      s += std::to_string(v_[i]);
    }
    return s + ")";
  }

 private:
  std::array<double, kMaxDim> v_{};
  int n_ = 0;
};

using Vec = Point;

}  // namespace sobexlab
