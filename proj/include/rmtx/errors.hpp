#pragma once

#include <stdexcept>
#include <string>

namespace rmtx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a point where the density is unbounded (e.g. MP law at 0).
class SingularPoint : public DomainError {
 public:
  using DomainError::DomainError;
};

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Iterative method gave up. Carries the best value reached and its residual.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double best_value, double residual)
      : Error(what + " (best=" + std::to_string(best_value) +
              ", residual=" + std::to_string(residual) + ")"),
        best_value_(best_value),
        residual_(residual) {}

  [[nodiscard]] double best_value() const noexcept { return best_value_; }
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double best_value_;
  double residual_;
};

}  // namespace rmtx
