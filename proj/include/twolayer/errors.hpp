#pragma once

#include <stdexcept>
#include <string>

namespace twolayer {

// Input that violates a documented precondition (bad parameters, malformed config).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(what), line(line) {}
  int line;
};

// The problem instance is outside the regime an operation is defined for
// (assumption verdict not Valid, defocusing coefficients, profile outside the cone).
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An algorithm failed to produce a trustworthy number.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace twolayer
