#pragma once

#include <stdexcept>
#include <string>

namespace gcre {

/// Malformed or inconsistent user input (meshes, configs, sampled data).
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The admissible set is empty, e.g. Dirichlet data violates the obstacle.
class InfeasibleProblem : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Iteration or factorization failure; carries the last residual.
class SolverFailure : public std::runtime_error {
  public:
    SolverFailure(const std::string &what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/// Equilibrated recovery could not be completed.
class RecoveryFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A pair failed admissibility checks; no bound may be reported for it.
class UncertifiedPair : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An API was called outside of its domain of validity.
class Misuse : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

} // namespace gcre
