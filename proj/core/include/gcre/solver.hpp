#pragma once

#include "gcre/fem.hpp"

#include <vector>

namespace gcre {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 100;
    /// Semismooth complementarity parameter; 0 selects diag(A)/weight.
    double complementarity_parameter = 0.0;
};

/// Result of the primal-dual active set iteration.
struct PrimalSolution {
    FeField u;
    std::vector<Index> active;      ///< constraint nodes in normal contact
    std::vector<Index> stick;       ///< contact nodes in stick
    int iterations = 0;
    double residual = 0.0;
    /// Energies of the accepted (feasible) iterates; non-increasing.
    std::vector<double> energy_history;
};

/// Displacement together with nodal multiplier densities.
///
/// lambda and omega are indexed like DiscreteSystem::constraints and are
/// densities with respect to the lumped weights.
struct MixedSolution {
    FeField u;
    Eigen::VectorXd lambda;
    Eigen::VectorXd omega;
    double stationarity_residual = 0.0;
};

struct ComplementarityResidual {
    double normal = 0.0;   ///< |b1(u, lambda) - g1(lambda)|
    double friction = 0.0; ///< |b2(u, omega) + j(u)|
    double friction_functional = 0.0;
    double scale = 1.0;    ///< max(1, a(u, u))
};

/// Throws InfeasibleProblem when Dirichlet data violate the constraints.
void check_dirichlet_feasibility(const DiscreteSystem &system);

/// Linear solve with Dirichlet data only; constraints and friction ignored.
FeField solve_linear(const DiscreteSystem &system);

/// Solves the discrete variational inequality by a primal-dual active set
/// (semismooth Newton) iteration. Throws SolverFailure on non-convergence.
PrimalSolution solve_primal(const DiscreteSystem &system, const SolverOptions &options = {});

/// Recovers lambda, omega from the residual A u - F at the constraint nodes,
/// projected onto the multiplier cones.
MixedSolution extract_multipliers(const DiscreteSystem &system, const FeField &u);

/// Discrete potential energy 1/2 u.Au - F.u + lumped friction.
double discrete_energy(const DiscreteSystem &system, const Eigen::VectorXd &u);

ComplementarityResidual complementarity(const DiscreteSystem &system,
                                        const MixedSolution &mixed);

} // namespace gcre
