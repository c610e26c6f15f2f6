#pragma once

#include "gcre/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <memory>

namespace gcre {

/// Lowest-order Raviart-Thomas field; in 1D the continuous P1 flux.
///
/// Degrees of freedom are normal components on facets with respect to
/// Mesh::facet_normal. On cell K the basis function of local facet e,
/// opposite vertex P_e, is s |e| / (d |K|) (x - P_e) with s the facet sign.
class Rt0Flux {
  public:
    Rt0Flux(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd facet_values);

    const Mesh &mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    const Eigen::VectorXd &values() const { return values_; }

    Point evaluate(Index cell, const Point &p) const;
    Point cell_integral(Index cell) const;
    double cell_divergence(Index cell) const;
    /// Integral of |q|^2 over a cell.
    double cell_norm_sq(Index cell) const;

    /// Local mass matrix of the basis functions of a cell.
    static std::array<std::array<double, 3>, 3> local_mass(const Mesh &mesh, Index cell);
    /// Coefficient of local basis function e: s |e| / (d |K|).
    static double basis_scale(const Mesh &mesh, Index cell, int e);

  private:
    std::shared_ptr<const Mesh> mesh_;
    Eigen::VectorXd values_;
};

struct SymTensor {
    double xx = 0.0, yy = 0.0, xy = 0.0;
};

/// Symmetric, exactly equilibrated stress built from a bicubic (Bogner-Fox-
/// Schmit) Airy function on a structured rectangle grid plus the particular
/// field -diag(f_x x, f_y y) for a constant body force.
///
/// Nodal degrees of freedom are (phi, phi_x, phi_y, phi_xy); the stress is
/// [[phi_yy, -phi_xy], [-phi_xy, phi_xx]] + particular.
class AiryStress {
  public:
    AiryStress(Grid grid, Eigen::VectorXd coefficients, std::array<double, 2> body_force);

    const Grid &grid() const { return grid_; }
    const Eigen::VectorXd &coefficients() const { return coef_; }
    const std::array<double, 2> &body_force() const { return force_; }

    SymTensor evaluate(const Point &p) const;
    /// Evaluation inside square (i, j) at local coordinates in [0, 1]^2.
    SymTensor evaluate_local(Index i, Index j, double xi, double eta) const;
    /// Airy-part stress of one basis function on square (i, j).
    static SymTensor basis_stress(const Grid &grid, int corner, int dof, double xi, double eta);

  private:
    Grid grid_;
    Eigen::VectorXd coef_;
    std::array<double, 2> force_;
};

/// Plane-strain compliance product sigma : C^{-1} : tau.
double compliance_product(double lambda, double mu, const SymTensor &s, const SymTensor &t);

} // namespace gcre
