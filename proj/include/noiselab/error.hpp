#pragma once

#include <stdexcept>
#include <string>

namespace noiselab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: out-of-range index, bad probability, malformed input.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A register, environment or expansion would exceed the configured size limit.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be positive semidefinite has a clearly negative eigenvalue.
class PsdError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Marginal targets that cannot come from a single state.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Never expected on valid input.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration problem; carries the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace noiselab
