#pragma once

#include <stdexcept>
#include <string>

namespace fraclen {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid curve description (bad parameters, irregular parametrization).
class CurveSpecError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run or estimator configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during an estimate (quadrature, resampling budget, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A single sample hit a measure-zero degenerate configuration; callers
/// are expected to draw again.
class DegenerateSampleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double best_estimate, double error_estimate)
      : NumericalError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace fraclen
