#pragma once

#include <stdexcept>
#include <string>

namespace sphcs {

// Base of every error raised by the library. The CLI maps InvalidArgument,
// ConstraintViolation and UnsupportedDimension onto exit code 2 and the rest
// onto 3 (numerical failure).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class ConstraintViolation : public Error {
public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
public:
  explicit UnsupportedDimension(int d)
      : Error("unsupported dimension d=" + std::to_string(d)) {}
  UnsupportedDimension(int d, const std::string &what)
      : Error(what + ": unsupported dimension d=" + std::to_string(d)) {}
};

// A truncation or convergence certificate could not be met.
class NonConvergence : public Error {
public:
  using Error::Error;
};

class QuadratureFailure : public Error {
public:
  using Error::Error;
};

class CutoffInsufficient : public Error {
public:
  using Error::Error;
};

class OverflowGuard : public Error {
public:
  using Error::Error;
};

} // namespace sphcs
