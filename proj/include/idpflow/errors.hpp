#pragma once

#include <stdexcept>
#include <string>

namespace idpflow {

/// Input state outside the admissible set, or an otherwise invalid argument.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Riemann data that would open a vacuum between the two waves.
class VacuumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid mesh geometry, e.g. a cell with non-positive Jacobian.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solver or time loop failure (exit code 3).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A property the scheme guarantees was observed to fail (exit code 4).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by a forward Euler stage when an imposed step exceeds the
/// admissible step of that stage. The splitting driver retries the step.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double tau_max)
      : std::runtime_error(what), tau_max_(tau_max) {}
  double tau_max() const { return tau_max_; }

 private:
  double tau_max_;
};

}  // namespace idpflow
