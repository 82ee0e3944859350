#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acwave {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Invalid grid, optics or hologram configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Base for everything that is a numerical (non-configuration) failure.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A series did not reach its tolerance within the term budget.
class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& what, double partial_sum, std::size_t terms)
      : NumericalError(what), partial_sum_(partial_sum), terms_(terms) {}

  double partial_sum() const noexcept { return partial_sum_; }
  std::size_t terms() const noexcept { return terms_; }

private:
  double partial_sum_;
  std::size_t terms_;
};

// Adaptive quadrature ran out of subintervals.
class QuadratureError : public NumericalError {
public:
  QuadratureError(const std::string& what, double estimate, double achieved_error)
      : NumericalError(what), estimate_(estimate), achieved_error_(achieved_error) {}

  double estimate() const noexcept { return estimate_; }
  double achieved_error() const noexcept { return achieved_error_; }

private:
  double estimate_;
  double achieved_error_;
};

// Phase of the accelerating wave requested where J+ vanishes.
class SingularRadiusError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Rotation registration on an image with no azimuthal structure.
class AmbiguousRotationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace acwave
