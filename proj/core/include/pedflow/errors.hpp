#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pedflow {

/// Argument outside the mathematical domain of a law (negative density, p > V, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A density reached the congestion density: the state left the admissible region.
class CongestionOverflow : public std::range_error {
 public:
  explicit CongestionOverflow(const std::string& what, double density = 0.0)
      : std::range_error(what), density_(density) {}
  double density() const noexcept { return density_; }

 private:
  double density_;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonHyperbolicError : public std::domain_error {
 public:
  explicit NonHyperbolicError(const std::string& what, double discriminant)
      : std::domain_error(what), discriminant_(discriminant) {}
  double discriminant() const noexcept { return discriminant_; }

 private:
  double discriminant_;
};

/// Zero density carrying non-zero momentum in an AR state.
class VacuumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for failures of the time integrator. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StabilityError : public NumericalError {
 public:
  StabilityError(const std::string& what, double measured)
      : NumericalError(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, std::size_t cell)
      : NumericalError(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// Cumulative negative-density clipping exceeded the allowed fraction of the mass.
class MassClipError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pedflow
