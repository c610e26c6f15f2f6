#include "gcre/reference.hpp"

#include "gcre/error.hpp"
#include "gcre/forms.hpp"
#include "gcre/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gcre {

namespace {

// Closed-form 1D solution with a multiplier density; kinks of u' and jumps
// of lambda are listed in `breaks` so that quadrature stays exact.
class Analytic1D final : public ReferenceSolution {
  public:
    using Fn = std::function<double(double)>;

    Analytic1D(std::string name, Fn u, Fn du, Fn lambda, std::vector<double> breaks)
        : name_(std::move(name)), u_(std::move(u)), du_(std::move(du)), lambda_(std::move(lambda)),
          breaks_(std::move(breaks)) {}

    double own_bound() const override { return 0.0; }

    ErrorSplit measure(const FeField &u_hat, const AdmissibleDual &dual,
                       const DiscreteSystem &sys) const override {
        const Mesh &mesh = *sys.mesh;
        if (mesh.dimension() != 1)
            throw Misuse("analytic reference is one-dimensional");
        const auto *flux = std::get_if<Rt0Flux>(&dual.flux);
        if (!flux)
            throw Misuse("analytic reference needs a scalar flux");
        static const auto rule = gauss_interval(5);
        const bool obstacle = sys.problem.has_obstacle();
        double primal = 0.0, dual_err = 0.0, term_p = 0.0, term_d = 0.0, cross = 0.0;
        for (Index c = 0; c < mesh.num_cells(); ++c) {
            const auto v = mesh.cell(c);
            const double xa = mesh.vertex(v[0])[0], xb = mesh.vertex(v[1])[0];
            const double lam_hat = dual.cell_reaction.size() > 0 ? dual.cell_reaction[c] : 0.0;
            const double grad_hat = u_hat.gradient(c)[0];
            std::vector<double> cuts{xa};
            for (double t : breaks_)
                if (t > xa && t < xb)
                    cuts.push_back(t);
            cuts.push_back(xb);
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
                const double len = cuts[s + 1] - cuts[s];
                for (const auto &q : rule) {
                    const double x = cuts[s] + q.ref[0] * len;
                    const Point p{x, 0.0};
                    const double w = q.weight * len;
                    const double e = u_hat.evaluate(c, p) - u_(x);
                    const double de = grad_hat - du_(x);
                    const double d = flux->evaluate(c, p)[0] - du_(x);
                    const double lam = lambda_(x);
                    const double psi = obstacle ? sys.problem.obstacle(p) : 0.0;
                    primal += 0.5 * w * de * de;
                    dual_err += 0.5 * w * d * d;
                    term_p += w * lam * (u_hat.evaluate(c, p) - psi);
                    term_d += w * lam_hat * (u_(x) - psi);
                    cross += w * (d * de - (lam_hat - lam) * e);
                }
            }
        }
        ErrorSplit out;
        out.primal_error = primal;
        out.dual_error = dual_err;
        out.phi_bar = primal + (obstacle ? term_p : 0.0);
        out.phi_bar_star = dual_err + (obstacle ? term_d : 0.0);
        out.cross_term = cross;
        return out;
    }

    MixedSolution restrict_to(const DiscreteSystem &sys) const override {
        MixedSolution m;
        m.u.mesh = sys.mesh;
        m.u.components = 1;
        m.u.values.resize(sys.mesh->num_vertices());
        for (Index v = 0; v < sys.mesh->num_vertices(); ++v)
            m.u.values[v] = u_(sys.mesh->vertex(v)[0]);
        m.lambda.resize(sys.num_constraints());
        for (Index k = 0; k < sys.num_constraints(); ++k)
            m.lambda[k] = lambda_(sys.mesh->vertex(sys.constraints[k].vertex)[0]);
        m.omega = Eigen::VectorXd::Zero(sys.num_constraints());
        return m;
    }

    std::string description() const override { return "analytic " + name_; }

  private:
    std::string name_;
    Fn u_, du_, lambda_;
    std::vector<double> breaks_;
};

bool matches(const ScalarField &f, const std::function<double(double)> &g, double a, double b) {
    for (int k = 0; k <= 16; ++k) {
        const double x = a + (b - a) * k / 16.0;
        if (std::abs(f({x, 0.0}) - g(x)) > 1e-12 * (1.0 + std::abs(g(x))))
            return false;
    }
    return true;
}

std::unique_ptr<ReferenceSolution> obstacle_parabola(const ProblemSpec &pr) {
    const auto *iv = std::get_if<Interval>(&pr.geometry);
    if (pr.kind != ProblemKind::obstacle_1d || !iv)
        throw InvalidInput("obstacle_parabola: needs a 1D obstacle problem");
    const double L = iv->b;
    if (std::abs(iv->a + L) > 1e-14 * L || !(L > 1.0))
        throw InvalidInput("obstacle_parabola: needs a symmetric interval (-L, L) with L > 1");
    auto zero = [](double) { return 0.0; };
    if (pr.orientation != ConeOrientation::below || !pr.obstacle ||
        !matches(pr.obstacle, [](double x) { return 1.0 - x * x; }, -L, L) ||
        !matches(pr.body_force[0], zero, -L, L) || !matches(pr.dirichlet[0], zero, -L, L) ||
        pr.tags[Side::left] != BoundaryTag::dirichlet ||
        pr.tags[Side::right] != BoundaryTag::dirichlet)
        throw InvalidInput("obstacle_parabola: data must be psi = 1 - x^2, f = 0, u = 0 at +-L");
    const double x0 = L - std::sqrt(L * L - 1.0);
    const double top = 1.0 - x0 * x0;
    auto u = [=](double x) {
        const double r = std::abs(x);
        return r <= x0 ? 1.0 - x * x : top * (L - r) / (L - x0);
    };
    auto du = [=](double x) {
        const double r = std::abs(x);
        if (r <= x0)
            return -2.0 * x;
        return (x > 0.0 ? -1.0 : 1.0) * top / (L - x0);
    };
    auto lambda = [=](double x) { return std::abs(x) < x0 ? 2.0 : 0.0; };
    return std::make_unique<Analytic1D>("obstacle_parabola", u, du, lambda,
                                        std::vector<double>{-x0, x0});
}

std::unique_ptr<ReferenceSolution> poisson_constant(const ProblemSpec &pr) {
    const auto *iv = std::get_if<Interval>(&pr.geometry);
    if (pr.kind != ProblemKind::linear_poisson || !iv)
        throw InvalidInput("poisson_constant: needs a 1D linear Poisson problem");
    const double a = iv->a, b = iv->b;
    const double f = pr.body_force[0]({a, 0.0});
    auto zero = [](double) { return 0.0; };
    if (!matches(pr.body_force[0], [=](double) { return f; }, a, b) ||
        !matches(pr.dirichlet[0], zero, a, b) || pr.tags[Side::left] != BoundaryTag::dirichlet ||
        pr.tags[Side::right] != BoundaryTag::dirichlet)
        throw InvalidInput("poisson_constant: needs constant f and u = 0 at both ends");
    auto u = [=](double x) { return 0.5 * f * (x - a) * (b - x); };
    auto du = [=](double x) { return 0.5 * f * (a + b - 2.0 * x); };
    return std::make_unique<Analytic1D>("poisson_constant", u, du, [](double) { return 0.0; },
                                        std::vector<double>{});
}

// Fine-mesh solution of the same problem on a nested uniform refinement.
class Overkill final : public ReferenceSolution {
  public:
    Overkill(const ProblemSpec &problem, const Mesh &mesh, Index factor,
             const SolverOptions &options)
        : factor_(factor) {
        if (factor < 2)
            throw InvalidInput("overkill: refinement factor must be at least 2");
        fine_ = std::make_shared<const Mesh>(refine(mesh, factor));
        sys_ = assemble(problem, fine_);
        check_dirichlet_feasibility(sys_);
        const PrimalSolution sol = solve_primal(sys_, options);
        mixed_ = extract_multipliers(sys_, sol.u);
        u_ = make_kinematically_admissible(sol.u, sys_);
        mixed_.u = u_;
        dual_ = recover_equilibrated_dual(sys_, mixed_);
        psi_ = gcre(u_, dual_, sys_).psi;
    }

    double own_bound() const override { return std::max(0.0, psi_); }

    ErrorSplit measure(const FeField &u_hat, const AdmissibleDual &dual,
                       const DiscreteSystem &sys) const override {
        check_nested(*sys.mesh);
        const FeField uh = prolongate(u_hat, fine_);
        const Eigen::VectorXd e = uh.values - u_.values;
        const AdmissibleDual t = transfer(dual, sys);

        ErrorSplit out;
        out.primal_error = 0.5 * e.dot(sys_.stiffness * e);
        double flux_cross = 0.0;
        out.dual_error = flux_difference(dual, e, flux_cross);
        const double term_p = (forms::b1(sys_, uh.values, dual_) - forms::g1(sys_, dual_)) +
                              (forms::b2(sys_, uh.values, dual_) + forms::friction(sys_, uh.values));
        const double term_d = (forms::b1(sys_, u_.values, t) - forms::g1(sys_, t)) +
                              (forms::b2(sys_, u_.values, t) + forms::friction(sys_, u_.values));
        out.phi_bar = out.primal_error + term_p;
        out.phi_bar_star = out.dual_error + term_d;
        out.cross_term = flux_cross - (forms::b1(sys_, e, t) - forms::b1(sys_, e, dual_)) -
                         (forms::b2(sys_, e, t) - forms::b2(sys_, e, dual_));
        return out;
    }

    MixedSolution restrict_to(const DiscreteSystem &sys) const override {
        check_nested(*sys.mesh);
        const Mesh &coarse = *sys.mesh;
        const int nc = sys.components;
        MixedSolution m;
        m.u.mesh = sys.mesh;
        m.u.components = nc;
        m.u.values.resize(coarse.num_vertices() * nc);
        for (Index v = 0; v < coarse.num_vertices(); ++v) {
            const Index fv = fine_vertex(coarse, v);
            for (int k = 0; k < nc; ++k)
                m.u.values[v * nc + k] = u_.values[fv * nc + k];
        }
        m.lambda = Eigen::VectorXd::Zero(sys.num_constraints());
        m.omega = Eigen::VectorXd::Zero(sys.num_constraints());
        for (Index k = 0; k < sys.num_constraints(); ++k) {
            const Index fk = sys_.constraint_of_vertex[fine_vertex(coarse, sys.constraints[k].vertex)];
            if (fk >= 0) {
                m.lambda[k] = mixed_.lambda[fk];
                m.omega[k] = mixed_.omega[fk];
            }
        }
        return m;
    }

    std::string description() const override {
        return fmt::format("overkill x{} ({} dofs, psi {:.3e})", factor_, sys_.num_dofs(), psi_);
    }

  private:
    // Refinement ratio between `coarse` and the reference mesh.
    Index check_nested(const Mesh &coarse) const {
        const auto &gc = coarse.grid();
        const auto &gf = fine_->grid();
        const Index r = gc && gc->nx > 0 ? gf->nx / gc->nx : 0;
        if (!gc || coarse.dimension() != fine_->dimension() || r < 1 || gc->nx * r != gf->nx ||
            gc->ny * r != gf->ny || gc->x0 != gf->x0 || gc->y0 != gf->y0 ||
            gc->width != gf->width || gc->height != gf->height)
            throw Misuse("overkill reference: mesh is not nested in the reference mesh");
        return r;
    }

    Index fine_vertex(const Mesh &coarse, Index v) const {
        const Grid &g = *coarse.grid();
        const Index r = fine_->grid()->nx / g.nx;
        if (coarse.dimension() == 1)
            return v * r;
        const Index i = v % (g.nx + 1), j = v / (g.nx + 1);
        return (r * j) * (g.nx * r + 1) + r * i;
    }

    // Multipliers of a coarse dual carried over to the fine mesh (exact for
    // cellwise constants and for piecewise linear tractions).
    AdmissibleDual transfer(const AdmissibleDual &dual, const DiscreteSystem &sys) const {
        const Mesh &coarse = *sys.mesh;
        AdmissibleDual t;
        if (dual.cell_reaction.size() > 0) {
            t.cell_reaction.resize(fine_->num_cells());
            for (Index c = 0; c < fine_->num_cells(); ++c)
                t.cell_reaction[c] = dual.cell_reaction[coarse.locate(fine_->centroid(c))];
        }
        if (!dual.contact.empty() && !dual_.contact.empty()) {
            t.contact = dual_.contact;
            const ContactTraction &ct = dual.contact;
            auto nodal = [&](const Eigen::VectorXd &vals, Index v) {
                const Index s = ct.slot[v];
                return s >= 0 ? vals[s] : 0.0;
            };
            for (std::size_t k = 0; k < t.contact.vertices.size(); ++k) {
                const Point &p = fine_->vertex(t.contact.vertices[k]);
                double ln = 0.0, lt = 0.0;
                for (Index f = 0; f < coarse.num_facets(); ++f) {
                    const Facet &fc = coarse.facet(f);
                    if (fc.tag != BoundaryTag::contact)
                        continue;
                    const Point &a = coarse.vertex(fc.vertices[0]), &b = coarse.vertex(fc.vertices[1]);
                    const double dx = b[0] - a[0], dy = b[1] - a[1];
                    const double len2 = dx * dx + dy * dy;
                    const double r = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
                    const double off = std::abs((p[0] - a[0]) * dy - (p[1] - a[1]) * dx);
                    if (r < -1e-12 || r > 1.0 + 1e-12 || off > 1e-12 * len2)
                        continue;
                    ln = (1.0 - r) * nodal(ct.normal, fc.vertices[0]) + r * nodal(ct.normal, fc.vertices[1]);
                    lt = (1.0 - r) * nodal(ct.tangential, fc.vertices[0]) +
                         r * nodal(ct.tangential, fc.vertices[1]);
                    break;
                }
                t.contact.normal[k] = ln;
                t.contact.tangential[k] = lt;
            }
        }
        return t;
    }

    // Returns 1/2 [p_hat - p, p_hat - p] and accumulates [p_hat - p, A e].
    double flux_difference(const AdmissibleDual &dual, const Eigen::VectorXd &e,
                           double &cross) const {
        double energy = 0.0;
        cross = 0.0;
        if (const auto *qc = std::get_if<Rt0Flux>(&dual.flux)) {
            const auto &qf = std::get<Rt0Flux>(dual_.flux);
            const Mesh &coarse = qc->mesh();
            const bool one_d = fine_->dimension() == 1;
            const auto rule = one_d ? gauss_interval(3) : gauss_triangle(3);
            const double ref_measure = one_d ? 1.0 : 0.5;
            for (Index c = 0; c < fine_->num_cells(); ++c) {
                const auto v = fine_->cell(c);
                const Index parent = coarse.locate(fine_->centroid(c));
                const auto g = fine_->basis_gradients(c);
                Point ge{0.0, 0.0};
                for (std::size_t k = 0; k < v.size(); ++k) {
                    ge[0] += e[v[k]] * g[k][0];
                    ge[1] += e[v[k]] * g[k][1];
                }
                const Point &a = fine_->vertex(v[0]), &b = fine_->vertex(v[1]);
                const Point &d = one_d ? a : fine_->vertex(v[2]);
                const double scale = fine_->cell_measure(c) / ref_measure;
                for (const auto &q : rule) {
                    Point p{a[0] + q.ref[0] * (b[0] - a[0]), a[1] + q.ref[0] * (b[1] - a[1])};
                    if (!one_d) {
                        p[0] += q.ref[1] * (d[0] - a[0]);
                        p[1] += q.ref[1] * (d[1] - a[1]);
                    }
                    const Point ph = qc->evaluate(parent, p), pf = qf.evaluate(c, p);
                    const double dx = ph[0] - pf[0], dy = ph[1] - pf[1];
                    energy += 0.5 * q.weight * scale * (dx * dx + dy * dy);
                    cross += q.weight * scale * (dx * ge[0] + dy * ge[1]);
                }
            }
            return energy;
        }
        const auto &sc = std::get<AiryStress>(dual.flux);
        const auto &sf = std::get<AiryStress>(dual_.flux);
        const Grid &g = sf.grid();
        const Material &m = sys_.problem.material;
        static const auto rule = gauss_triangle(5);
        for (Index c = 0; c < fine_->num_cells(); ++c) {
            const auto v = fine_->cell(c);
            const auto gr = fine_->basis_gradients(c);
            double exx = 0.0, eyy = 0.0, gxy = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double ux = e[2 * v[k]], uy = e[2 * v[k] + 1];
                exx += ux * gr[k][0];
                eyy += uy * gr[k][1];
                gxy += ux * gr[k][1] + uy * gr[k][0];
            }
            const Index s = c / 2;
            const Index i = s % g.nx, j = s / g.nx;
            const bool lower = c % 2 == 0;
            for (const auto &q : rule) {
                const double r = q.ref[0], t = q.ref[1];
                const double xi = lower ? r + t : r;
                const double eta = lower ? t : r + t;
                const Point p{g.x0 + (static_cast<double>(i) + xi) * g.hx,
                              g.y0 + (static_cast<double>(j) + eta) * g.hy};
                const SymTensor a = sc.evaluate(p), b = sf.evaluate_local(i, j, xi, eta);
                const SymTensor d{a.xx - b.xx, a.yy - b.yy, a.xy - b.xy};
                const double w = q.weight * g.hx * g.hy;
                energy += 0.5 * w * compliance_product(m.lambda, m.mu, d, d);
                cross += w * (d.xx * exx + d.yy * eyy + d.xy * gxy);
            }
        }
        return energy;
    }

    Index factor_;
    std::shared_ptr<const Mesh> fine_;
    DiscreteSystem sys_;
    MixedSolution mixed_;
    FeField u_;
    AdmissibleDual dual_;
    double psi_ = 0.0;
};

} // namespace

std::unique_ptr<ReferenceSolution> make_analytic_reference(const std::string &name,
                                                           const ProblemSpec &problem) {
    if (name == "obstacle_parabola")
        return obstacle_parabola(problem);
    if (name == "poisson_constant")
        return poisson_constant(problem);
    throw InvalidInput(fmt::format("unknown analytic reference '{}'", name));
}

std::unique_ptr<ReferenceSolution> make_overkill_reference(const ProblemSpec &problem,
                                                           const Mesh &mesh, Index factor,
                                                           const SolverOptions &options) {
    return std::make_unique<Overkill>(problem, mesh, factor, options);
}

} // namespace gcre
