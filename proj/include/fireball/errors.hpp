#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace fireball {

/// Argument outside the domain of a formula (non-positive variance, angle on
/// an axis, invariant below its structural bound, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation is not defined for the requested model kind.
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invariant lies below the minimum of the effective potential.
class NoMotionError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or other numerical procedure failed its own convergence check.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Shortest text that reads back as the same double.
inline std::string exact_text(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

}  // namespace fireball
