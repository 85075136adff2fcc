#pragma once

#include <stdexcept>
#include <string>

namespace sobexlab {

// Bad user input: parameter ranges, malformed configs, unknown keys.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf from an integrand, non-convergent grading, zero denominators.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A declared invariant of a report/experiment failed.
class InvariantFailure : public std::runtime_error {
 public:
  explicit InvariantFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sobexlab
