#include "gcre/fem.hpp"

#include "gcre/error.hpp"
#include "gcre/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gcre {

namespace {

using Triplet = Eigen::Triplet<double>;

Point map_to_cell(const Mesh &mesh, Index c, const std::array<double, 2> &ref) {
    const auto v = mesh.cell(c);
    const Point &a = mesh.vertex(v[0]), &b = mesh.vertex(v[1]);
    if (mesh.dimension() == 1)
        return {a[0] + ref[0] * (b[0] - a[0]), 0.0};
    const Point &d = mesh.vertex(v[2]);
    return {a[0] + ref[0] * (b[0] - a[0]) + ref[1] * (d[0] - a[0]),
            a[1] + ref[0] * (b[1] - a[1]) + ref[1] * (d[1] - a[1])};
}

double cell_diameter(const Mesh &mesh, Index c) {
    const auto v = mesh.cell(c);
    double h = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const Point &a = mesh.vertex(v[i]), &b = mesh.vertex(v[j]);
            h = std::max(h, std::hypot(b[0] - a[0], b[1] - a[1]));
        }
    return h;
}

// Squared radius of the smallest ball containing a cell; exact for the
// structured right triangles, Jung's bound otherwise.
double enclosing_radius_sq(const Mesh &mesh) {
    if (mesh.dimension() == 1)
        return 0.25 * mesh.h_max() * mesh.h_max();
    if (const auto &g = mesh.grid())
        return 0.25 * (g->hx * g->hx + g->hy * g->hy);
    return mesh.h_max() * mesh.h_max() / 3.0;
}

struct ContactFrame {
    int normal_component;
    double normal_sign;
    int tangent_component;
    double tangent_sign;
};

// Outward normal and counterclockwise tangent of a rectangle side.
ContactFrame frame_of(Side side) {
    switch (side) {
    case Side::bottom: return {1, -1.0, 0, 1.0};
    case Side::right: return {0, 1.0, 1, 1.0};
    case Side::top: return {1, 1.0, 0, -1.0};
    case Side::left: return {0, -1.0, 1, -1.0};
    }
    return {};
}

} // namespace

double FeField::evaluate(Index c, const Point &p, int component) const {
    const auto v = mesh->cell(c);
    const auto g = mesh->basis_gradients(c);
    const Point &x0 = mesh->vertex(v[0]);
    double value = (*this)(v[0], component);
    for (std::size_t k = 1; k < v.size(); ++k) {
        const double dv = (*this)(v[k], component) - (*this)(v[0], component);
        // basis k vanishes at v[0]
        value += dv * (g[k][0] * (p[0] - x0[0]) + g[k][1] * (p[1] - x0[1]));
    }
    return value;
}

Point FeField::gradient(Index c, int component) const {
    const auto v = mesh->cell(c);
    const auto g = mesh->basis_gradients(c);
    Point out{0.0, 0.0};
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double u = (*this)(v[k], component);
        out[0] += u * g[k][0];
        out[1] += u * g[k][1];
    }
    return out;
}

std::array<std::array<double, 3>, 3> elasticity_tensor(const Material &m) {
    const double d = m.lambda + 2.0 * m.mu;
    return {{{d, m.lambda, 0.0}, {m.lambda, d, 0.0}, {0.0, 0.0, m.mu}}};
}

DiscreteSystem assemble(const ProblemSpec &problem, std::shared_ptr<const Mesh> mesh_ptr) {
    problem.validate();
    if (!mesh_ptr)
        throw InvalidInput("assemble: no mesh");
    const Mesh &mesh = *mesh_ptr;
    if (mesh.dimension() != problem.dimension())
        throw InvalidInput("assemble: mesh and problem dimensions differ");

    DiscreteSystem sys;
    sys.mesh = mesh_ptr;
    sys.problem = problem;
    sys.components = problem.components();
    const int dim = mesh.dimension();
    const int ncomp = sys.components;
    const Index nv = mesh.num_vertices(), nc = mesh.num_cells();
    const Index ndof = sys.num_dofs();

    const auto cell_rule = dim == 1 ? gauss_interval(5) : gauss_triangle(5);
    const auto line_rule = gauss_interval(5);
    const double ref_measure = dim == 1 ? 1.0 : 0.5;

    // Projected body force and its oscillation.
    sys.cell_source.assign(nc, {0.0, 0.0});
    for (Index c = 0; c < nc; ++c)
        for (int k = 0; k < ncomp; ++k) {
            double integral = 0.0;
            for (const auto &q : cell_rule)
                integral += q.weight * problem.body_force[k](map_to_cell(mesh, c, q.ref));
            sys.cell_source[c][k] = integral / ref_measure;
        }
    if (problem.is_elastic()) {
        std::array<double, 2> mean{0.0, 0.0};
        double area = 0.0;
        for (Index c = 0; c < nc; ++c) {
            area += mesh.cell_measure(c);
            for (int k = 0; k < 2; ++k)
                mean[k] += sys.cell_source[c][k] * mesh.cell_measure(c);
        }
        for (auto &m : mean)
            m /= area;
        std::fill(sys.cell_source.begin(), sys.cell_source.end(), mean);
    }
    double osc = 0.0;
    for (Index c = 0; c < nc; ++c) {
        const double h = cell_diameter(mesh, c) / std::numbers::pi;
        for (int k = 0; k < ncomp; ++k) {
            double sq = 0.0;
            for (const auto &q : cell_rule) {
                const double d =
                    problem.body_force[k](map_to_cell(mesh, c, q.ref)) - sys.cell_source[c][k];
                sq += q.weight * d * d;
            }
            osc += h * h * sq * mesh.cell_measure(c) / ref_measure;
        }
    }

    // Projected Neumann data.
    sys.facet_traction.assign(mesh.num_facets(), {});
    for (Index f = 0; f < mesh.num_facets(); ++f) {
        const Facet &facet = mesh.facet(f);
        if (facet.tag != BoundaryTag::neumann)
            continue;
        const Point &a = mesh.vertex(facet.vertices[0]), &b = mesh.vertex(facet.vertices[1]);
        for (int k = 0; k < ncomp; ++k) {
            const auto &t = problem.traction[k];
            if (dim == 1) {
                sys.facet_traction[f][0][k] = sys.facet_traction[f][1][k] = t(a);
                continue;
            }
            auto at = [&](double s) {
                return Point{a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
            };
            if (problem.is_elastic()) {
                sys.facet_traction[f][0][k] = t(a);
                sys.facet_traction[f][1][k] = t(b);
            } else {
                double mean = 0.0;
                for (const auto &q : line_rule)
                    mean += q.weight * t(at(q.ref[0]));
                sys.facet_traction[f][0][k] = sys.facet_traction[f][1][k] = mean;
            }
            double sq = 0.0;
            for (const auto &q : line_rule) {
                const double s = q.ref[0];
                const double proj =
                    (1.0 - s) * sys.facet_traction[f][0][k] + s * sys.facet_traction[f][1][k];
                const double d = t(at(s)) - proj;
                sq += q.weight * d * d;
            }
            const double len = mesh.facet_measure(f);
            osc += len * len * sq;
        }
    }
    sys.data_oscillation = std::sqrt(osc);

    // Stiffness and load.
    std::vector<Triplet> triplets;
    sys.load = Eigen::VectorXd::Zero(ndof);
    const auto D = elasticity_tensor(problem.material);
    for (Index c = 0; c < nc; ++c) {
        const auto v = mesh.cell(c);
        const auto g = mesh.basis_gradients(c);
        const double area = mesh.cell_measure(c);
        const int nloc = dim + 1;
        if (!problem.is_elastic()) {
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j)
                    triplets.emplace_back(v[i], v[j],
                                          area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
                sys.load[v[i]] += sys.cell_source[c][0] * area / nloc;
            }
            continue;
        }
        // B columns: (dx, 0, dy) for x-displacement, (0, dy, dx) for y.
        double B[3][6] = {};
        for (int k = 0; k < 3; ++k) {
            B[0][2 * k] = g[k][0];
            B[2][2 * k] = g[k][1];
            B[1][2 * k + 1] = g[k][1];
            B[2][2 * k + 1] = g[k][0];
        }
        double DB[3][6] = {};
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 6; ++j)
                for (int s = 0; s < 3; ++s)
                    DB[r][j] += D[r][s] * B[s][j];
        for (int i = 0; i < 6; ++i) {
            const Index gi = 2 * v[i / 2] + i % 2;
            for (int j = 0; j < 6; ++j) {
                double kij = 0.0;
                for (int r = 0; r < 3; ++r)
                    kij += B[r][i] * DB[r][j];
                triplets.emplace_back(gi, 2 * v[j / 2] + j % 2, area * kij);
            }
            sys.load[gi] += sys.cell_source[c][i % 2] * area / 3.0;
        }
    }
    sys.stiffness.resize(ndof, ndof);
    sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());

    for (Index f = 0; f < mesh.num_facets(); ++f) {
        const Facet &facet = mesh.facet(f);
        if (facet.tag != BoundaryTag::neumann)
            continue;
        const auto &t = sys.facet_traction[f];
        if (dim == 1) {
            sys.load[facet.vertices[0]] += t[0][0];
            continue;
        }
        const double len = mesh.facet_measure(f);
        for (int k = 0; k < ncomp; ++k) {
            sys.load[sys.dof(facet.vertices[0], k)] += len * (2.0 * t[0][k] + t[1][k]) / 6.0;
            sys.load[sys.dof(facet.vertices[1], k)] += len * (t[0][k] + 2.0 * t[1][k]) / 6.0;
        }
    }

    // Dirichlet data.
    sys.dirichlet_mask.assign(ndof, 0);
    sys.dirichlet_values = Eigen::VectorXd::Zero(ndof);
    for (const Facet &facet : mesh.facets()) {
        if (facet.tag != BoundaryTag::dirichlet)
            continue;
        for (Index v : facet.vertices)
            for (int k = 0; k < ncomp; ++k) {
                sys.dirichlet_mask[sys.dof(v, k)] = 1;
                sys.dirichlet_values[sys.dof(v, k)] = problem.dirichlet[k](mesh.vertex(v));
            }
    }

    // Constraints.
    sys.constraint_of_vertex.assign(nv, -1);
    if (problem.has_obstacle()) {
        const double kappa = problem.constraint_curvature;
        sys.constraint_lift = 0.5 * kappa * enclosing_radius_sq(mesh);
        const double sense = problem.orientation == ConeOrientation::below ? 1.0 : -1.0;
        std::vector<double> weight(nv, 0.0);
        for (Index c = 0; c < nc; ++c)
            for (Index v : mesh.cell(c))
                weight[v] += mesh.cell_measure(c) / (dim + 1);
        for (Index v = 0; v < nv; ++v) {
            if (sys.dirichlet_mask[v])
                continue;
            ConstraintNode node;
            node.vertex = v;
            node.normal_dof = v;
            node.weight = weight[v];
            node.bound = problem.obstacle(mesh.vertex(v)) + sense * sys.constraint_lift;
            node.sense = sense;
            sys.constraint_of_vertex[v] = static_cast<Index>(sys.constraints.size());
            sys.constraints.push_back(node);
        }
    }
    if (problem.has_contact()) {
        double len_max = 0.0;
        for (Index f = 0; f < mesh.num_facets(); ++f)
            if (mesh.facet(f).tag == BoundaryTag::contact)
                len_max = std::max(len_max, mesh.facet_measure(f));
        sys.constraint_lift = 0.5 * problem.constraint_curvature * 0.25 * len_max * len_max;
        std::vector<double> weight(nv, 0.0);
        for (Index f = 0; f < mesh.num_facets(); ++f)
            if (mesh.facet(f).tag == BoundaryTag::contact)
                for (Index v : mesh.facet(f).vertices)
                    weight[v] += 0.5 * mesh.facet_measure(f);
        for (Side side : {Side::bottom, Side::right, Side::top, Side::left}) {
            if (problem.tags[side] != BoundaryTag::contact)
                continue;
            const ContactFrame fr = frame_of(side);
            for (Index v : mesh.side_vertices(side)) {
                if (sys.dirichlet_mask[sys.dof(v, 0)])
                    continue;
                const double s = problem.friction(mesh.vertex(v));
                if (!(s >= 0.0) || !std::isfinite(s))
                    throw InvalidInput("friction bound must be finite and non-negative");
                ConstraintNode node;
                node.vertex = v;
                node.normal_dof = sys.dof(v, fr.normal_component);
                node.normal_sign = fr.normal_sign;
                node.tangent_dof = sys.dof(v, fr.tangent_component);
                node.tangent_sign = fr.tangent_sign;
                node.weight = weight[v];
                node.bound = problem.obstacle(mesh.vertex(v)) - sys.constraint_lift;
                node.friction = s;
                node.sense = -1.0;
                sys.constraint_of_vertex[v] = static_cast<Index>(sys.constraints.size());
                sys.constraints.push_back(node);
            }
        }
    }

    if (problem.has_obstacle()) {
        sys.obstacle_cell_integral.assign(nc, 0.0);
        for (Index c = 0; c < nc; ++c) {
            double integral = 0.0;
            for (const auto &q : cell_rule)
                integral += q.weight * problem.obstacle(map_to_cell(mesh, c, q.ref));
            sys.obstacle_cell_integral[c] = integral * mesh.cell_measure(c) / ref_measure;
        }
    }
    if (problem.has_contact()) {
        sys.gap_moments.assign(mesh.num_facets(), {0.0, 0.0});
        sys.friction_nodal.assign(nv, 0.0);
        for (Index f = 0; f < mesh.num_facets(); ++f) {
            const Facet &facet = mesh.facet(f);
            if (facet.tag != BoundaryTag::contact)
                continue;
            const Point &a = mesh.vertex(facet.vertices[0]), &b = mesh.vertex(facet.vertices[1]);
            const double len = mesh.facet_measure(f);
            for (const auto &q : line_rule) {
                const double s = q.ref[0];
                const double gap =
                    problem.obstacle({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
                sys.gap_moments[f][0] += q.weight * len * gap * (1.0 - s);
                sys.gap_moments[f][1] += q.weight * len * gap * s;
            }
            for (Index v : facet.vertices) {
                const double s = problem.friction(mesh.vertex(v));
                if (!(s >= 0.0) || !std::isfinite(s))
                    throw InvalidInput("friction bound must be finite and non-negative");
                sys.friction_nodal[v] = s;
            }
        }
    }

    const Index m = sys.num_constraints();
    std::vector<Triplet> t1, t2;
    sys.g1 = Eigen::VectorXd::Zero(m);
    for (Index i = 0; i < m; ++i) {
        const ConstraintNode &n = sys.constraints[i];
        t1.emplace_back(i, n.normal_dof, n.weight * n.normal_sign);
        if (n.tangent_dof >= 0)
            t2.emplace_back(i, n.tangent_dof, n.weight * n.tangent_sign);
        sys.g1[i] = n.weight * n.bound;
    }
    sys.b1.resize(m, ndof);
    sys.b1.setFromTriplets(t1.begin(), t1.end());
    sys.b2.resize(m, ndof);
    sys.b2.setFromTriplets(t2.begin(), t2.end());
    return sys;
}

double energy_norm_sq(const DiscreteSystem &system, const FeField &v) {
    return v.values.dot(system.stiffness * v.values);
}

double lumped_friction(const DiscreteSystem &system, const Eigen::VectorXd &v) {
    double j = 0.0;
    for (const ConstraintNode &n : system.constraints)
        if (n.tangent_dof >= 0)
            j += n.weight * n.friction * std::abs(n.tangent_sign * v[n.tangent_dof]);
    return j;
}

FeField interpolate(std::shared_ptr<const Mesh> mesh, int components,
                    const std::array<ScalarField, 2> &fields) {
    FeField u;
    u.components = components;
    u.values.resize(mesh->num_vertices() * components);
    for (Index v = 0; v < mesh->num_vertices(); ++v)
        for (int k = 0; k < components; ++k)
            u.values[v * components + k] = fields[k](mesh->vertex(v));
    u.mesh = std::move(mesh);
    return u;
}

FeField prolongate(const FeField &coarse, std::shared_ptr<const Mesh> fine) {
    FeField u;
    u.components = coarse.components;
    u.values.resize(fine->num_vertices() * coarse.components);
    for (Index v = 0; v < fine->num_vertices(); ++v) {
        const Point &p = fine->vertex(v);
        const Index c = coarse.mesh->locate(p);
        for (int k = 0; k < coarse.components; ++k)
            u.values[v * coarse.components + k] = coarse.evaluate(c, p, k);
    }
    u.mesh = std::move(fine);
    return u;
}

} // namespace gcre
