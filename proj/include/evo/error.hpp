#pragma once

#include <stdexcept>
#include <string>

namespace evo {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signals or operators with incompatible grids or dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the holomorphy domain B(r,r).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point coincides with a pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition (weight too small, bad step, ...) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A constructed object violates its type invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Kernel symbol grows with the Laplace variable and cannot be realized.
class ImproperKernelError : public Error {
 public:
  using Error::Error;
};

/// Per-frequency system matrix is numerically singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace evo
