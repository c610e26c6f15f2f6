#include "gcre/forms.hpp"

#include "gcre/error.hpp"
#include "gcre/quadrature.hpp"

#include <cmath>

namespace gcre::forms {

namespace {

const std::vector<QuadraturePoint> &triangle_rule() {
    static const auto rule = gauss_triangle(5);
    return rule;
}

const std::vector<QuadraturePoint> &line_rule() {
    static const auto rule = gauss_interval(5);
    return rule;
}

const std::vector<QuadraturePoint> &square_rule() {
    static const auto rule = gauss_square(5);
    return rule;
}

// Visits the quadrature points of mesh cell c as square-local coordinates.
template <class F> void for_each_airy_point(const Grid &g, Index c, F &&fn) {
    const Index s = c / 2;
    const Index i = s % g.nx, j = s / g.nx;
    const bool lower = c % 2 == 0;
    for (const auto &q : triangle_rule()) {
        const double r = q.ref[0], t = q.ref[1];
        const double xi = lower ? r + t : r;
        const double eta = lower ? t : r + t;
        fn(i, j, xi, eta, q.weight * g.hx * g.hy);
    }
}

SymTensor primal_stress(const DiscreteSystem &sys, const Eigen::VectorXd &u, Index c) {
    const auto v = sys.mesh->cell(c);
    const auto g = sys.mesh->basis_gradients(c);
    double exx = 0.0, eyy = 0.0, gxy = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double ux = u[2 * v[k]], uy = u[2 * v[k] + 1];
        exx += ux * g[k][0];
        eyy += uy * g[k][1];
        gxy += ux * g[k][1] + uy * g[k][0];
    }
    const Material &m = sys.problem.material;
    const double tr = exx + eyy;
    return {m.lambda * tr + 2.0 * m.mu * exx, m.lambda * tr + 2.0 * m.mu * eyy, m.mu * gxy};
}

Point contact_tangent(const Point &n) { return {-n[1], n[0]}; }

double nodal(const ContactTraction &ct, const Eigen::VectorXd &values, Index vertex) {
    const Index s = ct.slot.empty() ? -1 : ct.slot[vertex];
    return s >= 0 ? values[s] : 0.0;
}

// Integral over a segment of the product of two linear functions.
double linear_product(double len, double a0, double a1, double b0, double b1) {
    return len * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1) / 6.0;
}

template <class F> void for_each_contact_facet(const DiscreteSystem &sys, F &&fn) {
    const Mesh &mesh = *sys.mesh;
    for (Index f = 0; f < mesh.num_facets(); ++f)
        if (mesh.facet(f).tag == BoundaryTag::contact)
            fn(f, mesh.facet(f), mesh.facet_normal(f), mesh.facet_measure(f));
}

double contact_pairing(const DiscreteSystem &sys, const Eigen::VectorXd &v,
                       const ContactTraction &ct, const Eigen::VectorXd &values, bool normal) {
    if (ct.empty())
        return 0.0;
    double sum = 0.0;
    for_each_contact_facet(sys, [&](Index, const Facet &facet, const Point &n, double len) {
        const Point d = normal ? n : contact_tangent(n);
        const Index a = facet.vertices[0], b = facet.vertices[1];
        const double va = d[0] * v[2 * a] + d[1] * v[2 * a + 1];
        const double vb = d[0] * v[2 * b] + d[1] * v[2 * b + 1];
        sum += linear_product(len, va, vb, nodal(ct, values, a), nodal(ct, values, b));
    });
    return sum;
}

} // namespace

SymTensor dual_at(const AdmissibleDual &dual, const Mesh &mesh, Index cell, const Point &p) {
    if (const auto *q = std::get_if<Rt0Flux>(&dual.flux)) {
        const Point v = q->evaluate(cell, p);
        return {v[0], v[1], 0.0};
    }
    if (const auto *a = std::get_if<AiryStress>(&dual.flux))
        return a->evaluate(p);
    (void)mesh;
    throw Misuse("dual triple has no flux");
}

double flux_energy(const DiscreteSystem &sys, const AdmissibleDual &dual) {
    double sum = 0.0;
    if (const auto *q = std::get_if<Rt0Flux>(&dual.flux)) {
        for (Index c = 0; c < q->mesh().num_cells(); ++c)
            sum += q->cell_norm_sq(c);
        return sum;
    }
    const auto &airy = std::get<AiryStress>(dual.flux);
    const Grid &g = airy.grid();
    const Material &m = sys.problem.material;
    for (Index j = 0; j < g.ny; ++j)
        for (Index i = 0; i < g.nx; ++i)
            for (const auto &q : square_rule()) {
                const SymTensor s = airy.evaluate_local(i, j, q.ref[0], q.ref[1]);
                sum += q.weight * g.hx * g.hy * compliance_product(m.lambda, m.mu, s, s);
            }
    return sum;
}

double constitutive_gap(const DiscreteSystem &sys, const AdmissibleDual &dual,
                        const Eigen::VectorXd &u) {
    const Mesh &mesh = *sys.mesh;
    double sum = 0.0;
    if (const auto *q = std::get_if<Rt0Flux>(&dual.flux)) {
        FeField field{sys.mesh, 1, u};
        for (Index c = 0; c < mesh.num_cells(); ++c) {
            const Point g = field.gradient(c);
            const Point iq = q->cell_integral(c);
            sum += q->cell_norm_sq(c) - 2.0 * (g[0] * iq[0] + g[1] * iq[1]) +
                   (g[0] * g[0] + g[1] * g[1]) * mesh.cell_measure(c);
        }
        return sum;
    }
    const auto &airy = std::get<AiryStress>(dual.flux);
    const Material &m = sys.problem.material;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const SymTensor su = primal_stress(sys, u, c);
        for_each_airy_point(airy.grid(), c, [&](Index i, Index j, double xi, double eta, double w) {
            SymTensor s = airy.evaluate_local(i, j, xi, eta);
            s.xx -= su.xx;
            s.yy -= su.yy;
            s.xy -= su.xy;
            sum += w * compliance_product(m.lambda, m.mu, s, s);
        });
    }
    return sum;
}

double dirichlet_work(const DiscreteSystem &sys, const AdmissibleDual &dual) {
    const Mesh &mesh = *sys.mesh;
    const auto &uD = sys.dirichlet_values;
    double sum = 0.0;
    for (Index f = 0; f < mesh.num_facets(); ++f) {
        const Facet &facet = mesh.facet(f);
        if (facet.tag != BoundaryTag::dirichlet)
            continue;
        if (const auto *q = std::get_if<Rt0Flux>(&dual.flux)) {
            const double mean = mesh.dimension() == 1
                                    ? uD[facet.vertices[0]]
                                    : 0.5 * (uD[facet.vertices[0]] + uD[facet.vertices[1]]);
            sum += q->values()[f] * mesh.facet_measure(f) * mean;
            continue;
        }
        const auto &airy = std::get<AiryStress>(dual.flux);
        const Index a = facet.vertices[0], b = facet.vertices[1];
        const Point &pa = mesh.vertex(a), &pb = mesh.vertex(b);
        const Point n = mesh.facet_normal(f);
        const double len = mesh.facet_measure(f);
        const Index c = facet.cells[0];
        const Point mid = mesh.centroid(c);
        for (const auto &q : line_rule()) {
            const double s = q.ref[0];
            // nudge towards the cell so the evaluation picks the right square
            Point p{pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])};
            const Point inside{p[0] + 1e-12 * (mid[0] - p[0]), p[1] + 1e-12 * (mid[1] - p[1])};
            const SymTensor st = airy.evaluate(inside);
            const double tx = st.xx * n[0] + st.xy * n[1];
            const double ty = st.xy * n[0] + st.yy * n[1];
            const double ux = (1.0 - s) * uD[2 * a] + s * uD[2 * b];
            const double uy = (1.0 - s) * uD[2 * a + 1] + s * uD[2 * b + 1];
            sum += q.weight * len * (tx * ux + ty * uy);
        }
    }
    return sum;
}

Eigen::VectorXd flux_load(const DiscreteSystem &sys, const AdmissibleDual &dual) {
    const Mesh &mesh = *sys.mesh;
    Eigen::VectorXd G = Eigen::VectorXd::Zero(sys.num_dofs());
    if (const auto *q = std::get_if<Rt0Flux>(&dual.flux)) {
        for (Index c = 0; c < mesh.num_cells(); ++c) {
            const auto v = mesh.cell(c);
            const auto g = mesh.basis_gradients(c);
            const Point iq = q->cell_integral(c);
            for (std::size_t k = 0; k < v.size(); ++k)
                G[v[k]] += g[k][0] * iq[0] + g[k][1] * iq[1];
        }
        return G;
    }
    const auto &airy = std::get<AiryStress>(dual.flux);
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        SymTensor integral;
        for_each_airy_point(airy.grid(), c, [&](Index i, Index j, double xi, double eta, double w) {
            const SymTensor s = airy.evaluate_local(i, j, xi, eta);
            integral.xx += w * s.xx;
            integral.yy += w * s.yy;
            integral.xy += w * s.xy;
        });
        const auto v = mesh.cell(c);
        const auto g = mesh.basis_gradients(c);
        for (int k = 0; k < 3; ++k) {
            G[2 * v[k]] += integral.xx * g[k][0] + integral.xy * g[k][1];
            G[2 * v[k] + 1] += integral.xy * g[k][0] + integral.yy * g[k][1];
        }
    }
    return G;
}

Eigen::VectorXd multiplier_load(const DiscreteSystem &sys, const AdmissibleDual &dual) {
    const Mesh &mesh = *sys.mesh;
    Eigen::VectorXd M = Eigen::VectorXd::Zero(sys.num_dofs());
    if (dual.cell_reaction.size() > 0) {
        for (Index c = 0; c < mesh.num_cells(); ++c) {
            const auto v = mesh.cell(c);
            const double share = dual.cell_reaction[c] * mesh.cell_measure(c) /
                                 static_cast<double>(v.size());
            for (Index k : v)
                M[k] += share;
        }
    }
    const ContactTraction &ct = dual.contact;
    if (!ct.empty()) {
        for_each_contact_facet(sys, [&](Index, const Facet &facet, const Point &n, double len) {
            const Point t = contact_tangent(n);
            const Index a = facet.vertices[0], b = facet.vertices[1];
            const double la = nodal(ct, ct.normal, a), lb = nodal(ct, ct.normal, b);
            const double wa = nodal(ct, ct.tangential, a), wb = nodal(ct, ct.tangential, b);
            const double ln_a = len * (2.0 * la + lb) / 6.0, ln_b = len * (la + 2.0 * lb) / 6.0;
            const double lt_a = len * (2.0 * wa + wb) / 6.0, lt_b = len * (wa + 2.0 * wb) / 6.0;
            for (int k = 0; k < 2; ++k) {
                M[2 * a + k] += n[k] * ln_a + t[k] * lt_a;
                M[2 * b + k] += n[k] * ln_b + t[k] * lt_b;
            }
        });
    }
    return M;
}

double b1(const DiscreteSystem &sys, const Eigen::VectorXd &v, const AdmissibleDual &dual) {
    if (dual.cell_reaction.size() > 0) {
        const Mesh &mesh = *sys.mesh;
        double sum = 0.0;
        for (Index c = 0; c < mesh.num_cells(); ++c) {
            const auto vv = mesh.cell(c);
            double mean = 0.0;
            for (Index k : vv)
                mean += v[k];
            mean /= static_cast<double>(vv.size());
            sum += dual.cell_reaction[c] * mesh.cell_measure(c) * mean;
        }
        return sum;
    }
    return contact_pairing(sys, v, dual.contact, dual.contact.normal, true);
}

double g1(const DiscreteSystem &sys, const AdmissibleDual &dual) {
    double sum = 0.0;
    if (dual.cell_reaction.size() > 0) {
        for (Index c = 0; c < sys.mesh->num_cells(); ++c)
            sum += dual.cell_reaction[c] * sys.obstacle_cell_integral[c];
        return sum;
    }
    const ContactTraction &ct = dual.contact;
    if (ct.empty())
        return 0.0;
    for_each_contact_facet(sys, [&](Index f, const Facet &facet, const Point &, double) {
        sum += nodal(ct, ct.normal, facet.vertices[0]) * sys.gap_moments[f][0] +
               nodal(ct, ct.normal, facet.vertices[1]) * sys.gap_moments[f][1];
    });
    return sum;
}

double b2(const DiscreteSystem &sys, const Eigen::VectorXd &v, const AdmissibleDual &dual) {
    return contact_pairing(sys, v, dual.contact, dual.contact.tangential, false);
}

double friction(const DiscreteSystem &sys, const Eigen::VectorXd &v) {
    if (!sys.problem.has_contact())
        return 0.0;
    double sum = 0.0;
    for_each_contact_facet(sys, [&](Index, const Facet &facet, const Point &n, double len) {
        const Point t = contact_tangent(n);
        const Index a = facet.vertices[0], b = facet.vertices[1];
        const double va = t[0] * v[2 * a] + t[1] * v[2 * a + 1];
        const double vb = t[0] * v[2 * b] + t[1] * v[2 * b + 1];
        const double sa = sys.friction_nodal[a], sb = sys.friction_nodal[b];
        if (va * vb >= 0.0) {
            sum += linear_product(len, sa, sb, std::abs(va), std::abs(vb));
            return;
        }
        const double r = va / (va - vb);
        const double sr = (1.0 - r) * sa + r * sb;
        sum += linear_product(r * len, sa, sr, std::abs(va), 0.0) +
               linear_product((1.0 - r) * len, sr, sb, 0.0, std::abs(vb));
    });
    return sum;
}

} // namespace gcre::forms
