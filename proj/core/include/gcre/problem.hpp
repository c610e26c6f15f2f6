#pragma once

#include "gcre/mesh.hpp"

#include <array>
#include <functional>
#include <string>

namespace gcre {

class Expression;

using ScalarField = std::function<double(const Point &)>;

ScalarField constant_field(double value);
ScalarField expression_field(const Expression &expression);

enum class ProblemKind { obstacle_1d, obstacle_2d, tresca_contact_2d, linear_poisson, linear_elasticity };

const char *to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string &name);

/// Obstacle side: `below` means u >= psi, `above` means u <= psi.
enum class ConeOrientation { below, above };

/// Lame parameters for plane strain.
struct Material {
    double lambda = 0.0;
    double mu = 0.0;

    static Material from_young(double young, double poisson);
};

/// Continuous problem data.
///
/// Scalar problems use component 0 of the vector-valued fields and unit
/// diffusivity; `traction` is then the prescribed outward flux du/dn.
/// For contact, `obstacle` is the gap phi with u.n <= phi on the contact
/// boundary and `friction` is the Tresca bound s >= 0.
/// `constraint_curvature` bounds the second derivatives of the obstacle
/// (along the contact boundary for the gap); it controls how much the nodal
/// constraint data are shifted so that nodal feasibility implies pointwise
/// feasibility.
struct ProblemSpec {
    ProblemKind kind = ProblemKind::linear_poisson;
    Geometry geometry = Interval{};
    SideTags tags;
    Material material;
    std::array<ScalarField, 2> body_force{constant_field(0.0), constant_field(0.0)};
    std::array<ScalarField, 2> traction{constant_field(0.0), constant_field(0.0)};
    std::array<ScalarField, 2> dirichlet{constant_field(0.0), constant_field(0.0)};
    ScalarField obstacle;
    double constraint_curvature = 0.0;
    ScalarField friction;
    ConeOrientation orientation = ConeOrientation::below;

    int dimension() const;
    int components() const;
    bool is_elastic() const;
    bool has_obstacle() const;
    bool has_contact() const;

    /// Throws InvalidInput describing the first inconsistency found.
    void validate() const;
};

} // namespace gcre
