#pragma once

#include <stdexcept>
#include <string>

namespace barrierkit {

// Bad user-supplied data: scenario fields, bounds, schedules.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (e.g. log of 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A state that is required to lie in G does not.
class RegionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation called in a state its contract does not allow.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invariant of an internal data structure was broken (e.g. zero adjoint).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Integration produced non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// |lambda^T f| drifted above the configured threshold: integration failure.
class DriftAbort : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Barrier arcs could not be chained into a simple closed loop.
class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace barrierkit
