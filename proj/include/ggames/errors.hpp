#pragma once

#include <stdexcept>
#include <string>

namespace ggames {

// Dimension or partition mismatch between inputs.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid parameter value (range, sign, empty input).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical hypothesis of the solver does not hold for the input.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Requested mode is not supported for this input (e.g. exact cut norm on too many blocks).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The intervention problem is trivial: with w < 0 and a budget covering the
// whole status quo, the planner simply cancels theta.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ggames
