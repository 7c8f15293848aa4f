#pragma once

#include <stdexcept>
#include <string>

namespace accel {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An iterate produced a NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Trajectory metadata disagrees with the arguments of a check.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// Expected excess risk is undefined for a zero Hessian.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Invalid synthetic spectrum parameters.
class SpecError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NotSymmetricError : public Error {
 public:
  using Error::Error;
};

class IndefiniteError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace accel
