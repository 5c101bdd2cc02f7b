#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad count, bad option).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the numerical machinery (quadrature, ODE stepping).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double worst_left, double worst_right,
                  double worst_error);

  double worst_left() const noexcept { return worst_left_; }
  double worst_right() const noexcept { return worst_right_; }
  double worst_error() const noexcept { return worst_error_; }

 private:
  double worst_left_;
  double worst_right_;
  double worst_error_;
};

/// The jump measure is not a finite, positive, spectrally positive measure.
class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

/// The jump measure has an infinite first moment.
class AssumptionViolation : public InvalidMeasure {
 public:
  using InvalidMeasure::InvalidMeasure;
};

/// The target density could not be evaluated or is not a usable density.
class MalformedDensity : public Error {
 public:
  using Error::Error;
};

/// pi(x) vanished at an interior point where the drift divides by it.
class DegenerateDensity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The drift ratio overflowed.
class DriftOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A computed drift value had the wrong sign.
class FormulaInconsistency : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Derivative requested at a breakpoint of pi.
class NonDifferentiablePoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
 public:
  StiffnessError(double x, double drift, double dt);

  double state() const noexcept { return x_; }
  double drift() const noexcept { return drift_; }
  double step() const noexcept { return dt_; }

 private:
  double x_;
  double drift_;
  double dt_;
};

/// The truncated measure mu restricted to (1/n, n) carries no mass.
class TrivialTruncation : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace llmc
