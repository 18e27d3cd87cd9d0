#pragma once

#include <stdexcept>
#include <string>

namespace bvgm {

/// Invalid distribution or transform parameters (non-positive scale, etc.).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Matrix failed to factor even after jitter.
struct NotSpdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConstantColumnError : std::invalid_argument {
  int column;
  explicit ConstantColumnError(int j)
      : std::invalid_argument("column " + std::to_string(j) + " has zero variance"),
        column(j) {}
};

/// Enumeration request above the hard cap.
struct TooLargeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MethodUnavailableError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Residual sum of squares collapsed to zero (exact interpolation).
struct DegenerateResidualError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A constant chain series; no autocorrelation is defined.
struct ZeroVarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace bvgm
