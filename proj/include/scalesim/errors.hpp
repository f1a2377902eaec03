#pragma once

#include <stdexcept>
#include <string>

namespace scalesim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received arguments outside its contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the interval an object is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The zero-energy part of the coordinate decomposition is not of bounded
/// variation, so no drift (function or measure) exists.
class NotBoundedVariation : public Error {
 public:
  using Error::Error;
};

/// A measure that must be absolutely continuous with respect to another is not.
class NotAbsolutelyContinuous : public Error {
 public:
  using Error::Error;
};

/// A structural hypothesis required by an operation does not hold.
class HypothesisFailure : public Error {
 public:
  HypothesisFailure(std::string hypothesis, const std::string& what)
      : Error(hypothesis + ": " + what), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

/// Decomposition audit found s != int g + kappa beyond tolerance.
class AuditFailure : public Error {
 public:
  using Error::Error;
};

/// Numerical integration overflowed or produced a non-finite value.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A simulation or test could not be carried out.
class RuntimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace scalesim
