#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain where a quantity is defined
/// (overlap outside [0,1], string length below 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A measurement strength outside the admissible interval [c, 1/c].
class InvalidMeasurement : public Error {
 public:
  InvalidMeasurement(const std::string& what, std::size_t position = 0)
      : Error(what), position_(position) {}

  /// 1-based schedule position of the offending strength, 0 if not applicable.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A closed form was requested outside the overlap range where it is valid.
class OutOfValidity : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A formula hit a vanishing denominator.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A recursion produced a non-finite value at a given position.
class NumericDomainError : public Error {
 public:
  NumericDomainError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Caller broke an interface contract (mismatched dimensions, asymmetric matrix, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qcp
