#pragma once

#include <stdexcept>
#include <string>

namespace fintime {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix with non-finite entries or a malformed shape.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// Fractional or negative power requested of a matrix whose smallest
/// eigenvalue is at or below the positivity floor. Inside a flow this means
/// the trajectory left the region where the Hessian is positive definite.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The gradient (or its normalizing quadratic form) vanished, so a
/// finite-time flow's right-hand side is undefined at this point.
class ZeroGradient : public Error {
 public:
  using Error::Error;
};

class AlphaOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

/// Bad user-supplied parameters or configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fintime
