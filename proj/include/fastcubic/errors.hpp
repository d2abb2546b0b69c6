#pragma once

#include <stdexcept>
#include <string>

namespace fastcubic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of its iteration or epoch budget.
class SolverBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared in an iterate.
class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

/// The shift-and-invert eigensolver could not certify its accuracy.
class EigBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The exact cubic solver found a hard case whose gradient is not orthogonal
/// to the bottom eigenspace.
class InconsistentInstance : public Error {
 public:
  using Error::Error;
};

/// A property the algorithm relies on was observed to fail at runtime.
class AlgorithmInvariantViolated : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastcubic
