#include "gcre/admissibility.hpp"

#include "gcre/error.hpp"
#include "gcre/forms.hpp"
#include "gcre/quadrature.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gcre {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

struct SideFrame {
    Point n, tau;
};

SideFrame side_frame(Side side) {
    switch (side) {
    case Side::bottom: return {{0.0, -1.0}, {1.0, 0.0}};
    case Side::right: return {{1.0, 0.0}, {0.0, 1.0}};
    case Side::top: return {{0.0, 1.0}, {-1.0, 0.0}};
    case Side::left: return {{-1.0, 0.0}, {0.0, -1.0}};
    }
    return {};
}

constexpr Side ccw_sides[4] = {Side::bottom, Side::right, Side::top, Side::left};

bool is_traction(BoundaryTag t) { return t == BoundaryTag::neumann || t == BoundaryTag::contact; }

// Shear stress implied at a point of a side by a traction there.
double shear_from_traction(const SideFrame &fr, const Point &t) {
    return fr.n[1] != 0.0 ? t[0] / fr.n[1] : t[1] / fr.n[0];
}

} // namespace

bool MembershipReport::certified() const {
    return kinematic_min_slack >= -1e-12 && dirichlet_mismatch <= 1e-12 &&
           weak_equilibrium_sup <= 1e-9 * equilibrium_scale && cone_violation <= 1e-12;
}

FeField make_kinematically_admissible(const FeField &u, const DiscreteSystem &sys) {
    check_dirichlet_feasibility(sys);
    FeField out = u;
    for (Index i = 0; i < out.values.size(); ++i)
        if (sys.dirichlet_mask[i])
            out.values[i] = sys.dirichlet_values[i];
    for (const ConstraintNode &n : sys.constraints) {
        const double un = n.normal_sign * out.values[n.normal_dof];
        if (n.sense * (un - n.bound) < 0.0)
            out.values[n.normal_dof] = n.normal_sign * n.bound;
    }
    return out;
}

ContactTraction contact_traction(const DiscreteSystem &sys, const MixedSolution &mixed) {
    const Mesh &mesh = *sys.mesh;
    ContactTraction ct;
    ct.slot.assign(mesh.num_vertices(), -1);
    std::vector<double> lam, om;
    for (Side side : ccw_sides) {
        if (sys.problem.tags[side] != BoundaryTag::contact)
            continue;
        const auto verts = mesh.side_vertices(side);
        for (std::size_t k = 0; k < verts.size(); ++k) {
            const Index v = verts[k];
            if (ct.slot[v] >= 0)
                continue;
            Index source = sys.constraint_of_vertex[v];
            if (source < 0) {
                // Dirichlet vertex: borrow the nearest constrained neighbour.
                const Index nb = k == 0 ? verts[std::min<std::size_t>(1, verts.size() - 1)]
                                        : verts[k - 1];
                source = sys.constraint_of_vertex[nb];
            }
            double l = 0.0, w = 0.0;
            if (source >= 0) {
                l = std::min(0.0, mixed.lambda[source]);
                const double s = sys.friction_nodal[v];
                w = std::clamp(mixed.omega[source], -s, s);
            }
            ct.slot[v] = static_cast<Index>(ct.vertices.size());
            ct.vertices.push_back(v);
            lam.push_back(l);
            om.push_back(w);
        }
    }
    ct.normal = Eigen::Map<Eigen::VectorXd>(lam.data(), static_cast<Index>(lam.size()));
    ct.tangential = Eigen::Map<Eigen::VectorXd>(om.data(), static_cast<Index>(om.size()));
    return ct;
}

AdmissibleDual recover_equilibrated_dual(const DiscreteSystem &sys, const MixedSolution &mixed) {
    if (mixed.lambda.size() != sys.num_constraints())
        throw InvalidInput("recovery: multiplier count does not match the constraints");
    if (sys.problem.is_elastic())
        return recover_elastic_dual(sys, contact_traction(sys, mixed));
    const Mesh &mesh = *sys.mesh;
    Eigen::VectorXd reaction;
    if (sys.problem.has_obstacle()) {
        reaction = Eigen::VectorXd::Zero(mesh.num_cells());
        const double sense = sys.problem.orientation == ConeOrientation::below ? 1.0 : -1.0;
        for (Index c = 0; c < mesh.num_cells(); ++c) {
            const auto v = mesh.cell(c);
            double sum = 0.0;
            for (Index k : v) {
                const Index i = sys.constraint_of_vertex[k];
                if (i >= 0)
                    sum += sense * std::max(0.0, sense * mixed.lambda[i]);
            }
            reaction[c] = sum / static_cast<double>(v.size());
        }
    }
    return recover_scalar_dual(sys, std::move(reaction));
}

AdmissibleDual recover_scalar_dual(const DiscreteSystem &sys, Eigen::VectorXd cell_reaction) {
    if (sys.problem.is_elastic())
        throw Misuse("scalar recovery called for an elasticity problem");
    const Mesh &mesh = *sys.mesh;
    const Index nf = mesh.num_facets(), nc = mesh.num_cells();
    const int d = mesh.dimension();
    const bool has_reaction = cell_reaction.size() > 0;
    if (has_reaction && cell_reaction.size() != nc)
        throw InvalidInput("recovery: one reaction value per cell required");

    // Free facets are numbered first, fixed (Neumann) facets carry data.
    std::vector<Index> free_id(nf, -1);
    Eigen::VectorXd fixed_value = Eigen::VectorXd::Zero(nf);
    Index nfree = 0;
    for (Index f = 0; f < nf; ++f) {
        if (mesh.facet(f).tag == BoundaryTag::neumann)
            fixed_value[f] = sys.facet_traction[f][0][0];
        else
            free_id[f] = nfree++;
    }

    std::vector<Triplet> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree + nc);
    for (Index f = 0; f < nf; ++f) {
        const Facet &facet = mesh.facet(f);
        if (facet.tag != BoundaryTag::dirichlet || free_id[f] < 0)
            continue;
        const auto &uD = sys.dirichlet_values;
        const double mean = d == 1 ? uD[facet.vertices[0]]
                                   : 0.5 * (uD[facet.vertices[0]] + uD[facet.vertices[1]]);
        rhs[free_id[f]] += mesh.facet_measure(f) * mean;
    }
    for (Index c = 0; c < nc; ++c) {
        const auto facets = mesh.cell_facets(c);
        const auto M = Rt0Flux::local_mass(mesh, c);
        for (int a = 0; a <= d; ++a) {
            const Index fa = facets[a];
            if (free_id[fa] < 0)
                continue;
            for (int b = 0; b <= d; ++b) {
                const Index fb = facets[b];
                if (free_id[fb] >= 0)
                    triplets.emplace_back(free_id[fa], free_id[fb], M[a][b]);
                else
                    rhs[free_id[fa]] -= M[a][b] * fixed_value[fb];
            }
        }
        // Divergence row: sum_e s_e |e| q_e = -(f + lambda) |K|.
        const double source = sys.cell_source[c][0] + (has_reaction ? cell_reaction[c] : 0.0);
        double row_rhs = -source * mesh.cell_measure(c);
        for (int e = 0; e <= d; ++e) {
            const Index f = facets[e];
            const double coef = mesh.facet_sign(f, c) * mesh.facet_measure(f);
            if (free_id[f] >= 0) {
                triplets.emplace_back(nfree + c, free_id[f], coef);
                triplets.emplace_back(free_id[f], nfree + c, coef);
            } else {
                row_rhs -= coef * fixed_value[f];
            }
        }
        rhs[nfree + c] = row_rhs;
    }
    SpMat K(nfree + nc, nfree + nc);
    K.setFromTriplets(triplets.begin(), triplets.end());
    K.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success)
        throw RecoveryFailure("flux recovery: singular saddle-point system");
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.allFinite())
        throw RecoveryFailure("flux recovery: solve failed");

    Eigen::VectorXd q = fixed_value;
    for (Index f = 0; f < nf; ++f)
        if (free_id[f] >= 0)
            q[f] = sol[free_id[f]];

    AdmissibleDual dual;
    dual.flux = Rt0Flux(sys.mesh, std::move(q));
    dual.cell_reaction = std::move(cell_reaction);
    dual.data_oscillation = sys.data_oscillation;
    const auto &flux = std::get<Rt0Flux>(dual.flux);
    double eq = 0.0;
    for (Index c = 0; c < nc; ++c) {
        const double target = sys.cell_source[c][0] + (has_reaction ? dual.cell_reaction[c] : 0.0);
        eq = std::max(eq, std::abs(flux.cell_divergence(c) + target));
    }
    dual.equilibrium_residual = eq;
    if (has_reaction && sys.problem.has_obstacle()) {
        const double sense = sys.problem.orientation == ConeOrientation::below ? 1.0 : -1.0;
        for (Index c = 0; c < nc; ++c)
            dual.cone_residuals[0] =
                std::max(dual.cone_residuals[0], -sense * dual.cell_reaction[c]);
    }
    return dual;
}

AdmissibleDual recover_elastic_dual(const DiscreteSystem &sys, ContactTraction contact) {
    if (!sys.problem.is_elastic())
        throw Misuse("elastic recovery called for a scalar problem");
    const Mesh &mesh = *sys.mesh;
    if (!mesh.grid())
        throw RecoveryFailure("stress recovery needs a structured rectangle mesh");
    const Grid &g = *mesh.grid();
    const ProblemSpec &pb = sys.problem;
    const Material &mat = pb.material;
    const std::array<double, 2> force = sys.cell_source.front();
    const Index nnode = (g.nx + 1) * (g.ny + 1);
    const Index ndof = 4 * nnode;
    if (contact.slot.empty())
        contact.slot.assign(mesh.num_vertices(), -1);

    auto particular_traction = [&](const Point &p, const Point &n) {
        return Point{-force[0] * p[0] * n[0], -force[1] * p[1] * n[1]};
    };

    // Nodal total tractions per side (one-sided at corners).
    auto total_traction = [&](Side side, Index v) -> Point {
        const SideFrame fr = side_frame(side);
        const Point &p = mesh.vertex(v);
        if (pb.tags[side] == BoundaryTag::neumann)
            return {pb.traction[0](p), pb.traction[1](p)};
        const Index s = contact.slot[v];
        const double l = s >= 0 ? contact.normal[s] : 0.0;
        const double w = s >= 0 ? contact.tangential[s] : 0.0;
        return {l * fr.n[0] + w * fr.tau[0], l * fr.n[1] + w * fr.tau[1]};
    };

    // Corner compatibility of shear stress between adjacent traction sides.
    const double tscale = 1.0 + sys.load.lpNorm<Eigen::Infinity>();
    for (int k = 0; k < 4; ++k) {
        const Side a = ccw_sides[k], b = ccw_sides[(k + 1) % 4];
        if (!is_traction(pb.tags[a]) || !is_traction(pb.tags[b]))
            continue;
        const Index corner = mesh.side_vertices(b).front();
        const SideFrame fa = side_frame(a), fb = side_frame(b);
        if (pb.tags[a] == BoundaryTag::neumann && pb.tags[b] == BoundaryTag::neumann) {
            const double sa = shear_from_traction(fa, total_traction(a, corner));
            const double sb = shear_from_traction(fb, total_traction(b, corner));
            if (std::abs(sa - sb) > 1e-12 * tscale * (1.0 + std::abs(sa)))
                throw RecoveryFailure(fmt::format(
                    "incompatible shear tractions at corner vertex {} ({} vs {})", corner, sa, sb));
            continue;
        }
        const Side neu = pb.tags[a] == BoundaryTag::neumann ? a : b;
        const Side con = neu == a ? b : a;
        const double shear = shear_from_traction(side_frame(neu), total_traction(neu, corner));
        const SideFrame fc = side_frame(con);
        const double omega =
            fc.n[1] != 0.0 ? shear * fc.n[1] / fc.tau[0] : shear * fc.n[0] / fc.tau[1];
        const double s = sys.friction_nodal[corner];
        if (std::abs(omega) > s + 1e-12 * (1.0 + s))
            throw RecoveryFailure(fmt::format(
                "corner vertex {}: shear traction {} exceeds the friction bound {}", corner,
                omega, s));
        const Index slot = contact.slot[corner];
        if (slot < 0)
            throw RecoveryFailure("contact corner without a traction slot");
        contact.tangential[slot] = omega;
    }

    // Boundary values of the Airy function along traction chains.
    Eigen::VectorXd fixed_value = Eigen::VectorXd::Zero(ndof);
    std::vector<char> fixed(ndof, 0);
    std::vector<Index> chain_of_node(nnode, -1);
    int start = -1;
    for (int k = 0; k < 4; ++k)
        if (is_traction(pb.tags[ccw_sides[k]]) && !is_traction(pb.tags[ccw_sides[(k + 3) % 4]])) {
            start = k;
            break;
        }
    int nchains = 0;
    if (start >= 0) {
        for (int k0 = 0; k0 < 4; ++k0) {
            const int k = (start + k0) % 4;
            if (!is_traction(pb.tags[ccw_sides[k]]) ||
                is_traction(pb.tags[ccw_sides[(k + 3) % 4]]))
                continue;
            const int chain = nchains++;
            double Phi[2] = {0.0, 0.0}, phi = 0.0;
            bool first = true;
            for (int m = k; is_traction(pb.tags[ccw_sides[m % 4]]); ++m) {
                const Side side = ccw_sides[m % 4];
                const SideFrame fr = side_frame(side);
                const bool horizontal = fr.n[0] == 0.0;
                const auto verts = mesh.side_vertices(side);
                auto airy_traction = [&](Index v) {
                    const Point t = total_traction(side, v);
                    const Point tp = particular_traction(mesh.vertex(v), fr.n);
                    return Point{t[0] - tp[0], t[1] - tp[1]};
                };
                auto store = [&](Index v, const Point &t) {
                    chain_of_node[v] = chain;
                    const Index base = 4 * v;
                    fixed[base] = fixed[base + 1] = fixed[base + 2] = fixed[base + 3] = 1;
                    fixed_value[base] = phi;
                    fixed_value[base + 1] = -Phi[1];
                    fixed_value[base + 2] = Phi[0];
                    fixed_value[base + 3] = horizontal ? fr.tau[0] * t[0] : -fr.tau[1] * t[1];
                };
                if (first) {
                    store(verts.front(), airy_traction(verts.front()));
                    first = false;
                }
                for (std::size_t e = 0; e + 1 < verts.size(); ++e) {
                    const Index a = verts[e], b = verts[e + 1];
                    const Point &pa = mesh.vertex(a), &pb_ = mesh.vertex(b);
                    const double len = std::hypot(pb_[0] - pa[0], pb_[1] - pa[1]);
                    const Point ta = airy_traction(a), tb = airy_traction(b);
                    const double int0 = len * Phi[0] + len * len * (2.0 * ta[0] + tb[0]) / 6.0;
                    const double int1 = len * Phi[1] + len * len * (2.0 * ta[1] + tb[1]) / 6.0;
                    phi += fr.tau[1] * int0 - fr.tau[0] * int1;
                    Phi[0] += 0.5 * len * (ta[0] + tb[0]);
                    Phi[1] += 0.5 * len * (ta[1] + tb[1]);
                    store(b, tb);
                }
                if (m - k >= 3)
                    break;
            }
        }
    }

    // Reduced coordinates: free dofs, then affine constants of chains > 0,
    // or a pinned node when there is no traction chain.
    if (nchains == 0)
        fixed[0] = fixed[1] = fixed[2] = 1;
    std::vector<Index> zid(ndof, -1);
    Index nz = 0;
    for (Index i = 0; i < ndof; ++i)
        if (!fixed[i])
            zid[i] = nz++;
    const Index nfree = nz;
    nz += 3 * std::max(0, nchains - 1);
    std::vector<Triplet> pt;
    for (Index i = 0; i < ndof; ++i)
        if (zid[i] >= 0)
            pt.emplace_back(i, zid[i], 1.0);
    for (Index v = 0; v < nnode; ++v) {
        const Index chain = chain_of_node[v];
        if (chain <= 0)
            continue;
        const Index col = nfree + 3 * (chain - 1);
        const Point &p = mesh.vertex(v);
        pt.emplace_back(4 * v, col, 1.0);
        pt.emplace_back(4 * v, col + 1, p[0]);
        pt.emplace_back(4 * v, col + 2, p[1]);
        pt.emplace_back(4 * v + 1, col + 1, 1.0);
        pt.emplace_back(4 * v + 2, col + 2, 1.0);
    }
    SpMat P(ndof, nz);
    P.setFromTriplets(pt.begin(), pt.end());

    // Compliance energy, coupling with the particular stress, Dirichlet work.
    const auto rule = gauss_square(4);
    std::vector<Triplet> ht;
    ht.reserve(static_cast<std::size_t>(g.nx * g.ny) * 256);
    Eigen::VectorXd lin = Eigen::VectorXd::Zero(ndof);
    std::vector<SymTensor> basis(16);
    for (Index j = 0; j < g.ny; ++j)
        for (Index i = 0; i < g.nx; ++i) {
            const Index nodes[4] = {j * (g.nx + 1) + i, j * (g.nx + 1) + i + 1,
                                    (j + 1) * (g.nx + 1) + i, (j + 1) * (g.nx + 1) + i + 1};
            double local[16][16] = {};
            double local_lin[16] = {};
            for (const auto &q : rule) {
                const double w = q.weight * g.hx * g.hy;
                for (int c = 0; c < 4; ++c)
                    for (int k = 0; k < 4; ++k)
                        basis[4 * c + k] = AiryStress::basis_stress(g, c, k, q.ref[0], q.ref[1]);
                const double x = g.x0 + (static_cast<double>(i) + q.ref[0]) * g.hx;
                const double y = g.y0 + (static_cast<double>(j) + q.ref[1]) * g.hy;
                const SymTensor sp{-force[0] * x, -force[1] * y, 0.0};
                for (int a = 0; a < 16; ++a) {
                    local_lin[a] += w * compliance_product(mat.lambda, mat.mu, basis[a], sp);
                    for (int b = a; b < 16; ++b)
                        local[a][b] +=
                            w * compliance_product(mat.lambda, mat.mu, basis[a], basis[b]);
                }
            }
            for (int a = 0; a < 16; ++a) {
                const Index ga = 4 * nodes[a / 4] + a % 4;
                lin[ga] += local_lin[a];
                for (int b = 0; b < 16; ++b) {
                    const Index gb = 4 * nodes[b / 4] + b % 4;
                    ht.emplace_back(ga, gb, a <= b ? local[a][b] : local[b][a]);
                }
            }
        }
    SpMat H(ndof, ndof);
    H.setFromTriplets(ht.begin(), ht.end());

    const auto line = gauss_interval(4);
    const auto &uD = sys.dirichlet_values;
    for (Index f = 0; f < mesh.num_facets(); ++f) {
        const Facet &facet = mesh.facet(f);
        if (facet.tag != BoundaryTag::dirichlet)
            continue;
        const Index a = facet.vertices[0], b = facet.vertices[1];
        const Point &pa = mesh.vertex(a), &pb_ = mesh.vertex(b);
        const Point n = mesh.facet_normal(f);
        const double len = mesh.facet_measure(f);
        for (const auto &q : line) {
            const double s = q.ref[0];
            const Point p{pa[0] + s * (pb_[0] - pa[0]), pa[1] + s * (pb_[1] - pa[1])};
            const double sx = (p[0] - g.x0) / g.hx, sy = (p[1] - g.y0) / g.hy;
            const Index i = std::clamp<Index>(static_cast<Index>(std::floor(sx)), 0, g.nx - 1);
            const Index j = std::clamp<Index>(static_cast<Index>(std::floor(sy)), 0, g.ny - 1);
            const double xi = sx - static_cast<double>(i), eta = sy - static_cast<double>(j);
            const Index nodes[4] = {j * (g.nx + 1) + i, j * (g.nx + 1) + i + 1,
                                    (j + 1) * (g.nx + 1) + i, (j + 1) * (g.nx + 1) + i + 1};
            const double ux = (1.0 - s) * uD[2 * a] + s * uD[2 * b];
            const double uy = (1.0 - s) * uD[2 * a + 1] + s * uD[2 * b + 1];
            for (int c = 0; c < 4; ++c)
                for (int k = 0; k < 4; ++k) {
                    const SymTensor st = AiryStress::basis_stress(g, c, k, xi, eta);
                    const double tx = st.xx * n[0] + st.xy * n[1];
                    const double ty = st.xy * n[0] + st.yy * n[1];
                    lin[4 * nodes[c] + k] -= q.weight * len * (tx * ux + ty * uy);
                }
        }
    }

    const SpMat Pt = P.transpose();
    const SpMat Hr = Pt * H * P;
    const Eigen::VectorXd rhs = -(Pt * (H * fixed_value + lin));
    Eigen::SimplicialLLT<SpMat> llt(Hr);
    if (llt.info() != Eigen::Success)
        throw RecoveryFailure("stress recovery: compliance matrix is not positive definite");
    const Eigen::VectorXd z = llt.solve(rhs);
    if (llt.info() != Eigen::Success || !z.allFinite())
        throw RecoveryFailure("stress recovery: solve failed");

    AdmissibleDual dual;
    dual.flux = AiryStress(g, P * z + fixed_value, force);
    dual.contact = std::move(contact);
    dual.data_oscillation = sys.data_oscillation;
    for (Index k = 0; k < dual.contact.normal.size(); ++k) {
        dual.cone_residuals[0] = std::max(dual.cone_residuals[0], dual.contact.normal[k]);
        const double s = sys.friction_nodal[dual.contact.vertices[k]];
        dual.cone_residuals[1] =
            std::max(dual.cone_residuals[1], std::abs(dual.contact.tangential[k]) - s);
    }
    return dual;
}

MembershipReport verify_membership(const FeField &u_hat, const AdmissibleDual &dual,
                                   const DiscreteSystem &sys) {
    MembershipReport rep;
    const Eigen::VectorXd &u = u_hat.values;
    if (u.size() != sys.num_dofs())
        throw InvalidInput("membership: primal field does not match the system");
    rep.kinematic_min_slack = std::numeric_limits<double>::infinity();
    for (const ConstraintNode &n : sys.constraints)
        rep.kinematic_min_slack = std::min(
            rep.kinematic_min_slack, n.sense * (n.normal_sign * u[n.normal_dof] - n.bound));
    if (sys.constraints.empty())
        rep.kinematic_min_slack = 0.0;
    for (Index i = 0; i < u.size(); ++i)
        if (sys.dirichlet_mask[i])
            rep.dirichlet_mismatch =
                std::max(rep.dirichlet_mismatch, std::abs(u[i] - sys.dirichlet_values[i]));

    const Eigen::VectorXd G = forms::flux_load(sys, dual);
    const Eigen::VectorXd M = forms::multiplier_load(sys, dual);
    double sup = 0.0;
    for (Index i = 0; i < G.size(); ++i)
        if (!sys.dirichlet_mask[i])
            sup = std::max(sup, std::abs(G[i] - M[i] - sys.load[i]));
    rep.weak_equilibrium_sup = sup;
    rep.equilibrium_scale = 1.0 + G.lpNorm<Eigen::Infinity>() + sys.load.lpNorm<Eigen::Infinity>();

    const ProblemSpec &pb = sys.problem;
    if (pb.has_obstacle()) {
        const double sense = pb.orientation == ConeOrientation::below ? 1.0 : -1.0;
        for (Index c = 0; c < dual.cell_reaction.size(); ++c)
            rep.cone_violation = std::max(rep.cone_violation, -sense * dual.cell_reaction[c]);
        if (const auto *q = std::get_if<Rt0Flux>(&dual.flux))
            for (Index c = 0; c < sys.mesh->num_cells(); ++c)
                rep.multiplier_consistency =
                    std::max(rep.multiplier_consistency,
                             std::abs(q->cell_divergence(c) + sys.cell_source[c][0] +
                                      dual.cell_reaction[c]));
    }
    if (pb.has_contact()) {
        const ContactTraction &ct = dual.contact;
        for (Index k = 0; k < ct.normal.size(); ++k) {
            const double s = sys.friction_nodal[ct.vertices[k]];
            rep.cone_violation = std::max(rep.cone_violation, ct.normal[k]);
            rep.cone_violation =
                std::max(rep.cone_violation, std::abs(ct.tangential[k]) - s);
        }
        if (const auto *a = std::get_if<AiryStress>(&dual.flux)) {
            const Mesh &mesh = *sys.mesh;
            for (Side side : ccw_sides) {
                if (pb.tags[side] != BoundaryTag::contact)
                    continue;
                const SideFrame fr = side_frame(side);
                for (Index v : mesh.side_vertices(side)) {
                    const SymTensor st = a->evaluate(mesh.vertex(v));
                    const double tn = fr.n[0] * (st.xx * fr.n[0] + st.xy * fr.n[1]) +
                                      fr.n[1] * (st.xy * fr.n[0] + st.yy * fr.n[1]);
                    const double tt = fr.tau[0] * (st.xx * fr.n[0] + st.xy * fr.n[1]) +
                                      fr.tau[1] * (st.xy * fr.n[0] + st.yy * fr.n[1]);
                    const Index slot = ct.slot[v];
                    rep.multiplier_consistency =
                        std::max({rep.multiplier_consistency, std::abs(tn - ct.normal[slot]),
                                  std::abs(tt - ct.tangential[slot])});
                }
            }
        }
    }
    return rep;
}

void write_dual(std::ostream &os, const AdmissibleDual &dual, const DiscreteSystem &sys) {
    const Mesh &mesh = *sys.mesh;
    const bool elastic = std::holds_alternative<AiryStress>(dual.flux);
    fmt::print(os, elastic ? "cell,x,y,sxx,syy,sxy\n" : "cell,x,y,qx,qy,reaction\n");
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const Point m = mesh.centroid(c);
        const SymTensor s = forms::dual_at(dual, mesh, c, m);
        const double third = elastic ? s.xy
                                     : (dual.cell_reaction.size() > 0 ? dual.cell_reaction[c] : 0.0);
        fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c, m[0], m[1], s.xx, s.yy,
                   third);
    }
}

} // namespace gcre
