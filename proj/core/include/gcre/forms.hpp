#pragma once

#include "gcre/admissibility.hpp"

namespace gcre::forms {

// Continuous forms evaluated on the mesh of a DiscreteSystem for P1 primal
// fields (as coefficient vectors) and dual triples. All integrals are exact
// for the discrete fields up to rounding.

/// [p, p]
double flux_energy(const DiscreteSystem &system, const AdmissibleDual &dual);
/// [p - A grad u, p - A grad u]
double constitutive_gap(const DiscreteSystem &system, const AdmissibleDual &dual,
                        const Eigen::VectorXd &u);
/// Integral over the Dirichlet boundary of (p n) . u_D with u_D interpolated.
double dirichlet_work(const DiscreteSystem &system, const AdmissibleDual &dual);
/// G_i = [p, A grad phi_i] for every dof.
Eigen::VectorXd flux_load(const DiscreteSystem &system, const AdmissibleDual &dual);
/// M_i = b1(phi_i, lambda) + b2(phi_i, omega) for every dof.
Eigen::VectorXd multiplier_load(const DiscreteSystem &system, const AdmissibleDual &dual);

double b1(const DiscreteSystem &system, const Eigen::VectorXd &v, const AdmissibleDual &dual);
double g1(const DiscreteSystem &system, const AdmissibleDual &dual);
double b2(const DiscreteSystem &system, const Eigen::VectorXd &v, const AdmissibleDual &dual);
/// Friction functional with the friction bound interpolated nodally.
double friction(const DiscreteSystem &system, const Eigen::VectorXd &v);

/// Dual field at a point of a cell; a scalar flux q is returned as (xx, yy) = (q_x, q_y).
SymTensor dual_at(const AdmissibleDual &dual, const Mesh &mesh, Index cell, const Point &p);

} // namespace gcre::forms
