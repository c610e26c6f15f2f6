#include "gcre/problem.hpp"

#include "gcre/error.hpp"
#include "gcre/expression.hpp"

#include <cmath>

namespace gcre {

ScalarField constant_field(double value) {
    return [value](const Point &) { return value; };
}

ScalarField expression_field(const Expression &expression) {
    return [expression](const Point &p) { return expression(p[0], p[1]); };
}

const char *to_string(ProblemKind kind) {
    switch (kind) {
    case ProblemKind::obstacle_1d: return "obstacle_1d";
    case ProblemKind::obstacle_2d: return "obstacle_2d";
    case ProblemKind::tresca_contact_2d: return "tresca_contact_2d";
    case ProblemKind::linear_poisson: return "linear_poisson";
    case ProblemKind::linear_elasticity: return "linear_elasticity";
    }
    return "?";
}

ProblemKind parse_problem_kind(const std::string &name) {
    for (ProblemKind k : {ProblemKind::obstacle_1d, ProblemKind::obstacle_2d,
                          ProblemKind::tresca_contact_2d, ProblemKind::linear_poisson,
                          ProblemKind::linear_elasticity})
        if (name == to_string(k))
            return k;
    throw InvalidInput("unknown problem kind '" + name + "'");
}

Material Material::from_young(double young, double poisson) {
    if (!(young > 0.0) || !(poisson > -1.0) || !(poisson < 0.5))
        throw InvalidInput("material: need E > 0 and -1 < nu < 0.5");
    return {young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)),
            young / (2.0 * (1.0 + poisson))};
}

int ProblemSpec::dimension() const {
    return std::holds_alternative<Interval>(geometry) ? 1 : 2;
}

int ProblemSpec::components() const { return is_elastic() ? 2 : 1; }

bool ProblemSpec::is_elastic() const {
    return kind == ProblemKind::tresca_contact_2d || kind == ProblemKind::linear_elasticity;
}

bool ProblemSpec::has_obstacle() const {
    return kind == ProblemKind::obstacle_1d || kind == ProblemKind::obstacle_2d;
}

bool ProblemSpec::has_contact() const { return kind == ProblemKind::tresca_contact_2d; }

void ProblemSpec::validate() const {
    const int dim = dimension();
    if (kind == ProblemKind::obstacle_1d && dim != 1)
        throw InvalidInput("obstacle_1d needs an interval geometry");
    if ((kind == ProblemKind::obstacle_2d || is_elastic()) && dim != 2)
        throw InvalidInput(std::string(to_string(kind)) + " needs a rectangle geometry");

    std::vector<Side> sides = dim == 1 ? std::vector<Side>{Side::left, Side::right}
                                       : std::vector<Side>{Side::bottom, Side::right,
                                                           Side::top, Side::left};
    bool has_dirichlet = false, contact = false;
    for (Side s : sides) {
        has_dirichlet |= tags[s] == BoundaryTag::dirichlet;
        contact |= tags[s] == BoundaryTag::contact;
    }
    if (!has_dirichlet)
        throw InvalidInput("at least one side must carry Dirichlet data");
    if (contact && !has_contact())
        throw InvalidInput("contact boundaries are only valid for tresca_contact_2d");
    if (has_contact() && !contact)
        throw InvalidInput("tresca_contact_2d needs a contact side");
    if (has_contact()) {
        for (std::size_t k = 0; k < sides.size(); ++k) {
            const Side a = sides[k], b = sides[(k + 1) % sides.size()];
            if (tags[a] == BoundaryTag::contact && tags[b] == BoundaryTag::contact)
                throw InvalidInput("adjacent contact sides are not supported");
        }
    }
    if (is_elastic() && (!(material.mu > 0.0) || !(material.lambda + material.mu > 0.0)))
        throw InvalidInput("material: need mu > 0 and lambda + mu > 0");
    if ((has_obstacle() || has_contact()) && !obstacle)
        throw InvalidInput("constrained problem without obstacle/gap data");
    if (has_contact() && !friction)
        throw InvalidInput("contact problem without a friction bound");
    if (!(constraint_curvature >= 0.0) || !std::isfinite(constraint_curvature))
        throw InvalidInput("constraint curvature bound must be finite and non-negative");
    for (int c = 0; c < components(); ++c)
        if (!body_force[c] || !traction[c] || !dirichlet[c])
            throw InvalidInput("missing body force, traction or Dirichlet data");
}

} // namespace gcre
