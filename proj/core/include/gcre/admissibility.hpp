#pragma once

#include "gcre/fem.hpp"
#include "gcre/flux.hpp"
#include "gcre/solver.hpp"

#include <iosfwd>
#include <variant>

namespace gcre {

/// Nodal P1 contact tractions on the closure of the contact boundary:
/// sigma n = normal * n + tangential * tau with tau the counterclockwise
/// tangent.
struct ContactTraction {
    std::vector<Index> vertices;
    Eigen::VectorXd normal;
    Eigen::VectorXd tangential;
    std::vector<Index> slot; ///< per mesh vertex, index into the arrays or -1

    bool empty() const { return vertices.empty(); }
};

/// Dual triple (p, lambda, omega) with diagnostics from the recovery.
struct AdmissibleDual {
    std::variant<std::monostate, Rt0Flux, AiryStress> flux;
    /// Obstacle reaction density per cell (empty without obstacle).
    Eigen::VectorXd cell_reaction;
    ContactTraction contact;
    double equilibrium_residual = 0.0;
    std::array<double, 2> cone_residuals{0.0, 0.0};
    double data_oscillation = 0.0;
};

struct MembershipReport {
    double kinematic_min_slack = 0.0;   ///< >= 0 means feasible
    double dirichlet_mismatch = 0.0;
    double weak_equilibrium_sup = 0.0;  ///< sup over non-Dirichlet basis functions
    double equilibrium_scale = 1.0;
    double cone_violation = 0.0;
    double multiplier_consistency = 0.0;

    bool certified() const;
};

/// Nodal projection onto the (shifted) constraint set; only the normal
/// component is changed for contact. Throws InfeasibleProblem if the
/// Dirichlet data are infeasible.
FeField make_kinematically_admissible(const FeField &u, const DiscreteSystem &system);

/// Equilibrated dual triple from a mixed discrete solution.
///
/// Scalar problems: the reaction density per cell is the mean of the nodal
/// multipliers, the flux minimizes the complementary energy in RT0 under the
/// divergence and Neumann constraints. Elasticity: contact tractions are the
/// nodal multipliers, the stress minimizes the complementary energy over
/// Airy stresses matching all boundary tractions.
AdmissibleDual recover_equilibrated_dual(const DiscreteSystem &system, const MixedSolution &mixed);

/// Scalar recovery for a prescribed reaction density per cell.
AdmissibleDual recover_scalar_dual(const DiscreteSystem &system, Eigen::VectorXd cell_reaction);

/// Elastic recovery for prescribed nodal contact tractions.
AdmissibleDual recover_elastic_dual(const DiscreteSystem &system, ContactTraction contact);

/// Contact tractions from the nodal multipliers of a mixed solution.
ContactTraction contact_traction(const DiscreteSystem &system, const MixedSolution &mixed);

MembershipReport verify_membership(const FeField &u_hat, const AdmissibleDual &dual,
                                   const DiscreteSystem &system);

/// Columnar text export of the dual fields (one line per cell).
void write_dual(std::ostream &os, const AdmissibleDual &dual, const DiscreteSystem &system);

} // namespace gcre
