#pragma once

#include <stdexcept>
#include <string>

namespace igalam {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the parametric or physical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid knot vector, degree or space layout.
class SplineError : public Error {
 public:
  using Error::Error;
};

/// Inadmissible material constants or stiffness.
class MaterialError : public Error {
 public:
  using Error::Error;
};

/// Layup cannot be represented by a single homogenized stiffness.
class HomogenizationError : public Error {
 public:
  using Error::Error;
};

/// Boundary conditions that cannot be combined at a collocation point.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear system is singular or the solution is not finite.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Displacement space lacks the regularity needed for recovery.
class RecoveryError : public Error {
 public:
  using Error::Error;
};

/// Malformed case configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace igalam
