#pragma once

#include <stdexcept>
#include <string>

namespace rds {

/// Base class for all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A noise point outside the box, an out-of-range family parameter, or an
/// undefined geometric quantity (e.g. the boundary of the whole circle).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Window index outside the realized span.
class IndexError : public Error {
public:
  using Error::Error;
};

/// An operation was called on inputs that violate its stated hypotheses.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Iteration failed to converge, or a numeric invariant broke.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Minimal-set / symmetry estimation produced inconsistent data.
class StructureError : public Error {
public:
  using Error::Error;
};

/// The random conjugacy could not be assembled from the anchor data.
class ConjugacyError : public Error {
public:
  using Error::Error;
};

/// Malformed run configuration or family descriptor.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace rds
