#pragma once

#include <stdexcept>
#include <string>

namespace lrflow {

/// Operands live in different dimensions (so(n) vs so(m), R^n vs R^m, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates the invariant of the type it is being turned into,
/// e.g. a non-orthogonal matrix passed as a Rotation.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear system (Gram matrix, operator restriction, Legendre map) is
/// singular or not positive definite.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An initial state does not satisfy the constraints of its system.
class ConstraintViolation : public std::invalid_argument {
 public:
  ConstraintViolation(std::string constraint, double residual)
      : std::invalid_argument("constraint '" + constraint +
                              "' violated (residual " +
                              std::to_string(residual) + ")"),
        constraint_(std::move(constraint)),
        residual_(residual) {}

  const std::string& constraint() const { return constraint_; }
  double residual() const { return residual_; }

 private:
  std::string constraint_;
  double residual_;
};

}  // namespace lrflow
