#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown model, negative omega, malformed config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Coupling at or beyond the Bogolubov validity bound.
class ValidityError : public Error {
 public:
  ValidityError(const std::string& what, double gCritical)
      : Error(what), gCritical_(gCritical) {}
  double gCritical() const { return gCritical_; }

 private:
  double gCritical_;
};

// Request outside the domain of an exact method (lambda = 0, no Juddian
// solution, state not at a crossing, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: non-convergence, pole proximity, eigensolver failure.
class NumericError : public Error {
 public:
  using Error::Error;
};

class PoleProximityError : public NumericError {
 public:
  PoleProximityError(const std::string& what, int index)
      : NumericError(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class NonConvergenceError : public NumericError {
 public:
  NonConvergenceError(const std::string& what, double tail)
      : NumericError(what), tail_(tail) {}
  double tailMagnitude() const { return tail_; }

 private:
  double tail_;
};

class NearSingularFError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Caller broke a documented precondition (e.g. unnormalized state).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace rabi
