#pragma once

#include "gcre/mesh.hpp"
#include "gcre/problem.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace gcre {

/// Continuous P1 field; values are interleaved as vertex * components + c.
struct FeField {
    std::shared_ptr<const Mesh> mesh;
    int components = 1;
    Eigen::VectorXd values;

    double operator()(Index vertex, int component = 0) const {
        return values[vertex * components + component];
    }
    /// Value at a point of cell c.
    double evaluate(Index c, const Point &p, int component = 0) const;
    /// Constant gradient of a component on cell c.
    Point gradient(Index c, int component = 0) const;
};

/// A nodal inequality constraint together with its lumped weight.
///
/// The constrained quantity is v_n = normal_sign * v[normal_dof]; it must
/// satisfy sense * (v_n - bound) >= 0. For contact nodes the tangential
/// quantity is v_t = tangent_sign * v[tangent_dof].
struct ConstraintNode {
    Index vertex = -1;
    Index normal_dof = -1;
    double normal_sign = 1.0;
    Index tangent_dof = -1;
    double tangent_sign = 0.0;
    double weight = 0.0;
    double bound = 0.0;
    double friction = 0.0;
    double sense = 1.0;
};

/// Assembled P1 discretization of a ProblemSpec.
///
/// Matrices are stored before Dirichlet elimination. The body force is
/// replaced by its cellwise mean (scalar problems) or its domain mean
/// (elasticity); Neumann data by facet means (scalar) or nodal
/// interpolation per side (elasticity). These projected data are the ones
/// the estimator uses. Constraint data are the nodal obstacle/gap values
/// shifted by `constraint_lift`.
struct DiscreteSystem {
    std::shared_ptr<const Mesh> mesh;
    ProblemSpec problem;
    int components = 1;

    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd load;
    std::vector<char> dirichlet_mask;
    Eigen::VectorXd dirichlet_values;

    std::vector<ConstraintNode> constraints;
    std::vector<Index> constraint_of_vertex;
    /// b1(v, eta) = eta^T b1 v and b2(v, xi) = xi^T b2 v with lumped weights.
    Eigen::SparseMatrix<double> b1, b2;
    /// g1(eta) = g1 . eta
    Eigen::VectorXd g1;
    double constraint_lift = 0.0;

    /// Integral of the true obstacle over each cell (obstacle problems).
    std::vector<double> obstacle_cell_integral;
    /// Per contact facet: integrals of gap * (1 - s) and gap * s along it.
    std::vector<std::array<double, 2>> gap_moments;
    /// Nodal friction bound (zero away from the contact boundary).
    std::vector<double> friction_nodal;

    std::vector<std::array<double, 2>> cell_source;
    /// Per facet, per endpoint (facet vertex order), per component.
    std::vector<std::array<std::array<double, 2>, 2>> facet_traction;
    double data_oscillation = 0.0;

    Index num_dofs() const { return mesh->num_vertices() * components; }
    Index dof(Index vertex, int component) const { return vertex * components + component; }
    Index num_constraints() const { return static_cast<Index>(constraints.size()); }
};

DiscreteSystem assemble(const ProblemSpec &problem, std::shared_ptr<const Mesh> mesh);

/// a(v, v) with the full (unconstrained) stiffness matrix.
double energy_norm_sq(const DiscreteSystem &system, const FeField &v);

/// Lumped friction functional sum_i w_i s_i |v_t,i|.
double lumped_friction(const DiscreteSystem &system, const Eigen::VectorXd &v);

/// Nodal interpolation of vector data.
FeField interpolate(std::shared_ptr<const Mesh> mesh, int components,
                    const std::array<ScalarField, 2> &fields);

/// Exact transfer of a P1 field onto a nested refinement.
FeField prolongate(const FeField &coarse, std::shared_ptr<const Mesh> fine);

/// Plane-strain elasticity tensor in Voigt form [xx, yy, xy(engineering)].
std::array<std::array<double, 3>, 3> elasticity_tensor(const Material &material);

} // namespace gcre
