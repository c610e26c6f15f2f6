#include "gcre/estimator.hpp"

#include "gcre/error.hpp"
#include "gcre/forms.hpp"
#include "gcre/quadrature.hpp"
#include "gcre/reference.hpp"

#include <fmt/format.h>

#include <cmath>

namespace gcre {

double potential_energy(const FeField &u, const DiscreteSystem &sys) {
    const Eigen::VectorXd &v = u.values;
    return 0.5 * v.dot(sys.stiffness * v) - sys.load.dot(v) + forms::friction(sys, v);
}

double complementary_energy(const AdmissibleDual &dual, const DiscreteSystem &sys) {
    return 0.5 * forms::flux_energy(sys, dual) - forms::g1(sys, dual) -
           forms::dirichlet_work(sys, dual);
}

EnergyTriple gcre(const FeField &u_hat, const AdmissibleDual &dual, const DiscreteSystem &sys) {
    const MembershipReport rep = verify_membership(u_hat, dual, sys);
    if (!rep.certified())
        throw UncertifiedPair(fmt::format(
            "pair not certified: min slack {:.3e}, Dirichlet mismatch {:.3e}, equilibrium {:.3e} "
            "(scale {:.3e}), cone violation {:.3e}",
            rep.kinematic_min_slack, rep.dirichlet_mismatch, rep.weak_equilibrium_sup,
            rep.equilibrium_scale, rep.cone_violation));
    const Eigen::VectorXd &u = u_hat.values;
    EnergyTriple e;
    e.psi = 0.5 * forms::constitutive_gap(sys, dual, u) +
            (forms::b1(sys, u, dual) - forms::g1(sys, dual)) +
            (forms::b2(sys, u, dual) + forms::friction(sys, u));
    e.f_p = potential_energy(u_hat, sys);
    e.f_c = complementary_energy(dual, sys);
    e.identity_residual = std::abs(e.psi - (e.f_p + e.f_c));
    return e;
}

double classic_cre_linear(const FeField &u_hat, const AdmissibleDual &dual,
                          const DiscreteSystem &sys) {
    for (double s : sys.friction_nodal)
        if (s != 0.0)
            throw Misuse("classic CRE called with a friction term");
    if (dual.cell_reaction.size() > 0 && dual.cell_reaction.lpNorm<Eigen::Infinity>() > 0.0)
        throw Misuse("classic CRE called with a nonzero obstacle reaction");
    if (!dual.contact.empty() && (dual.contact.normal.lpNorm<Eigen::Infinity>() > 0.0 ||
                                  dual.contact.tangential.lpNorm<Eigen::Infinity>() > 0.0))
        throw Misuse("classic CRE called with nonzero contact tractions");

    const Mesh &mesh = *sys.mesh;
    const auto rule = mesh.dimension() == 1 ? gauss_interval(6) : gauss_triangle(6);
    const double ref_measure = mesh.dimension() == 1 ? 1.0 : 0.5;
    const Material &m = sys.problem.material;
    double sum = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const auto v = mesh.cell(c);
        const Point &a = mesh.vertex(v[0]), &b = mesh.vertex(v[1]);
        const Point d = mesh.dimension() == 1 ? a : mesh.vertex(v[2]);
        const double scale = mesh.cell_measure(c) / ref_measure;
        // strain (or gradient) of u_hat
        double e[3] = {0.0, 0.0, 0.0};
        const auto g = mesh.basis_gradients(c);
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (sys.components == 1) {
                e[0] += u_hat(v[k]) * g[k][0];
                e[1] += u_hat(v[k]) * g[k][1];
            } else {
                e[0] += u_hat(v[k], 0) * g[k][0];
                e[1] += u_hat(v[k], 1) * g[k][1];
                e[2] += 0.5 * (u_hat(v[k], 0) * g[k][1] + u_hat(v[k], 1) * g[k][0]);
            }
        }
        for (const auto &q : rule) {
            Point p{a[0] + q.ref[0] * (b[0] - a[0]), a[1] + q.ref[0] * (b[1] - a[1])};
            if (mesh.dimension() == 2) {
                p[0] += q.ref[1] * (d[0] - a[0]);
                p[1] += q.ref[1] * (d[1] - a[1]);
            }
            const SymTensor s = forms::dual_at(dual, mesh, c, p);
            double value;
            if (sys.components == 1) {
                // K = identity: (sigma - grad u) . (sigma - grad u)
                value = (s.xx - e[0]) * (s.xx - e[0]) + (s.yy - e[1]) * (s.yy - e[1]);
            } else {
                // (sigma - C eps) : (C^{-1} sigma - eps)
                const double tr = e[0] + e[1];
                const double kxx = m.lambda * tr + 2.0 * m.mu * e[0];
                const double kyy = m.lambda * tr + 2.0 * m.mu * e[1];
                const double kxy = 2.0 * m.mu * e[2];
                const double kappa = m.lambda / (2.0 * (m.lambda + m.mu));
                const double str = s.xx + s.yy;
                const double cxx = (s.xx - kappa * str) / (2.0 * m.mu) - e[0];
                const double cyy = (s.yy - kappa * str) / (2.0 * m.mu) - e[1];
                const double cxy = s.xy / (2.0 * m.mu) - e[2];
                value = (s.xx - kxx) * cxx + (s.yy - kyy) * cyy + 2.0 * (s.xy - kxy) * cxy;
            }
            sum += q.weight * scale * value;
        }
    }
    return 0.5 * sum;
}

ErrorSplit error_functionals(const FeField &u_hat, const AdmissibleDual &dual,
                             const ReferenceSolution &reference, const DiscreteSystem &sys) {
    return reference.measure(u_hat, dual, sys);
}

GcreReport bound_report(const FeField &u_hat, const AdmissibleDual &dual,
                        const DiscreteSystem &sys, const ReferenceSolution *reference) {
    GcreReport r;
    r.membership = verify_membership(u_hat, dual, sys);
    r.energy = gcre(u_hat, dual, sys);
    r.error_bound = r.energy.psi;
    r.data_oscillation = dual.data_oscillation;
    r.scale = std::max({1.0, std::abs(r.energy.psi), energy_norm_sq(sys, u_hat)});
    if (reference) {
        const ErrorSplit split = reference->measure(u_hat, dual, sys);
        r.split = split;
        r.reference_error = split.primal_error;
        const double psi_ref = reference->own_bound();
        r.reference_tolerance =
            psi_ref + 2.0 * std::sqrt(std::max(0.0, r.energy.psi) * std::max(0.0, psi_ref));
        const double slack = 1e-12 * r.scale;
        r.bound_ok = split.primal_error <= r.energy.psi + r.reference_tolerance + slack;
        if (split.primal_error > slack)
            r.effectivity = r.energy.psi / split.primal_error;
    }
    return r;
}

} // namespace gcre
