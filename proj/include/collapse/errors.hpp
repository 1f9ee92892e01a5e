#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Matrix dimensions do not match what an operation requires.
struct ShapeError : Error {
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Input violates a documented precondition (non-finite entries,
/// nonzero global mean, off-manifold state, ...).
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

/// A linear system or matrix function hit rank deficiency or an
/// eigenvalue below the configured floor. The message names the
/// offending matrix and the eigenvalue ratio that triggered it.
struct SingularSystemError : Error {
  explicit SingularSystemError(const std::string& msg) : Error(msg) {}
};

/// Geometry too degenerate to measure (zero-norm class means etc.).
struct DegenerateGeometryError : Error {
  explicit DegenerateGeometryError(const std::string& msg) : Error(msg) {}
};

/// Iterative numerics failed (root bracket, flow step guard, ...).
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

}  // namespace collapse
