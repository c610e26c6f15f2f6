#pragma once

#include "gcre/estimator.hpp"

#include <memory>
#include <string>

namespace gcre {

/// A trusted solution against which discrete pairs are measured.
class ReferenceSolution {
  public:
    virtual ~ReferenceSolution() = default;

    /// Bound on the reference's own energy error (0 for closed forms).
    virtual double own_bound() const = 0;
    /// Error functionals of a pair on `system` with respect to this solution.
    virtual ErrorSplit measure(const FeField &u_hat, const AdmissibleDual &dual,
                               const DiscreteSystem &system) const = 0;
    /// Nodal restriction onto the mesh of `system`; multipliers are sampled
    /// at the constraint nodes.
    virtual MixedSolution restrict_to(const DiscreteSystem &system) const = 0;
    virtual std::string description() const = 0;
};

/// Closed-form references:
///  - "obstacle_parabola": u on (-L, L), L > 1, psi = 1 - x^2, f = 0, u = 0 at both ends;
///  - "poisson_constant": u = f (x - a)(b - x) / 2 for constant f on (a, b).
/// Throws InvalidInput if the problem does not match the named solution.
std::unique_ptr<ReferenceSolution> make_analytic_reference(const std::string &name,
                                                           const ProblemSpec &problem);

/// Overkill reference solved on `refine(mesh, factor)`.
std::unique_ptr<ReferenceSolution> make_overkill_reference(const ProblemSpec &problem,
                                                           const Mesh &mesh, Index factor,
                                                           const SolverOptions &options = {});

} // namespace gcre
