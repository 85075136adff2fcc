#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sobexlab {

// Counter-based random stream: every variate is a pure function of
// (seed, stream, counter, dim), so parallel evaluation order and thread
// count never change results.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream))) {}

  // Uniform in [0,1).
  double uniform(std::uint64_t counter, std::uint32_t dim) const {
    const std::uint64_t bits =
        mix64(key_ ^ mix64(counter * 0x9e3779b97f4a7c15ULL + dim));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; `slot` selects independent variates.
  double normal(std::uint64_t counter, std::uint32_t slot) const {
    const std::uint32_t pair = slot / 2;
    const double u1 = uniform(counter, 1000 + 2 * pair);
    const double u2 = uniform(counter, 1001 + 2 * pair);
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double a = 2.0 * M_PI * u2;
    return (slot % 2 == 0) ? r * std::cos(a) : r * std::sin(a);
  }

 private:
  std::uint64_t key_;
};

}  // namespace sobexlab
