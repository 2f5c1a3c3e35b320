#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid problem definition or call arguments (N, p, lambda, grid bounds).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a formula (nonpositive radius, lambda at the Hardy threshold).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (e.g. lambda != lambda_j for a degenerate kernel).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered or integer overflow.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Integrand not decaying at the end of a truncated grid.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failure (bisection, shooting, step control).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A computed first eigenvalue is not negative, so the infimum may not be attained.
class NotAttainedError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// No sign change found in a scan range.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace hardy
