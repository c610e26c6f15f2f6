// One PASS/FAIL line per acceptance criterion; exit code 1 if any fails.
#include "gcre/conjugate.hpp"
#include "gcre/error.hpp"
#include "gcre/estimator.hpp"
#include "gcre/expression.hpp"
#include "gcre/reference.hpp"
#include "gcre/study.hpp"
#include "oracles/oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>

using namespace gcre;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string &name, bool ok, const std::string &detail) {
    fmt::print("{} [{}] {}: {}\n", ok ? "PASS" : "FAIL", id, name, detail);
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

void guarded(int id, const std::string &name, const std::function<void()> &body) {
    try {
        body();
    } catch (const std::exception &e) {
        report(id, name, false, fmt::format("exception: {}", e.what()));
    }
}

// Energy-sum identity over every certified pair seen by the suite.
struct IdentityLedger {
    int pairs = 0;
    int perturbed = 0;
    double worst = 0.0;

    void add(const FeField &u, const AdmissibleDual &dual, const DiscreteSystem &sys,
             bool optimal) {
        const EnergyTriple e = gcre::gcre(u, dual, sys);
        worst = std::max(worst, e.identity_residual / (1.0 + std::abs(e.psi)));
        ++pairs;
        if (!optimal)
            ++perturbed;
    }
} ledger;

SampledFunction random_convex(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> size(3, 60);
    std::uniform_real_distribution<double> step(0.01, 1.0), slope(-3.0, 3.0), incr(0.0, 2.0);
    const int n = size(rng);
    std::vector<double> x(n), f(n);
    x[0] = slope(rng);
    f[0] = slope(rng);
    double s = slope(rng);
    for (int k = 1; k < n; ++k) {
        x[k] = x[k - 1] + step(rng);
        f[k] = f[k - 1] + s * (x[k] - x[k - 1]);
        s += incr(rng);
    }
    return SampledFunction(std::move(x), std::move(f));
}

std::vector<double> conjugate_slopes(const SampledFunction &f, int count) {
    const auto x = f.grid();
    const auto v = f.values();
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        const double s = (v[k + 1] - v[k]) / (x[k + 1] - x[k]);
        lo = k == 0 ? s : std::min(lo, s);
        hi = k == 0 ? s : std::max(hi, s);
    }
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k)
        out[k] = lo - 1.0 + (hi - lo + 2.0) * k / (count - 1);
    return out;
}

std::shared_ptr<const Mesh> mesh_of(const ProblemSpec &p, std::array<Index, 2> n) {
    return std::make_shared<const Mesh>(build_mesh(p.geometry, n, p.tags));
}

MixedSolution solve_mixed(const DiscreteSystem &sys, const SolverOptions &opts = {1e-12, 200}) {
    const PrimalSolution s = solve_primal(sys, opts);
    MixedSolution m = extract_multipliers(sys, s.u);
    m.u = make_kinematically_admissible(s.u, sys);
    return m;
}

StudyConfig config(const std::string &name) {
    return load_config(std::filesystem::path(GCRE_CONFIG_DIR) / name);
}

void fenchel_young() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    double worst = std::numeric_limits<double>::infinity();
    long evaluations = 0;
    for (int t = 0; t < 1000; ++t) {
        const SampledFunction f = random_convex(rng);
        const auto slopes = conjugate_slopes(f, 64);
        const SampledFunction fs = discrete_conjugate(f, slopes);
        std::uniform_real_distribution<double> px(f.grid().front(), f.grid().back());
        std::uniform_real_distribution<double> py(slopes.front() - 5.0, slopes.back() + 5.0);
        for (int k = 0; k < 1000; ++k) {
            const double gap = fenchel_young_gap(f, fs, px(rng), py(rng));
            worst = std::min(worst, gap);
            ++evaluations;
        }
    }
    const double secs = seconds_since(t0);
    report(1, "Fenchel-Young nonnegativity", worst >= -1e-12 && secs < 10.0,
           fmt::format("{} gaps, min {:.3e} (>= -1e-12), {:.2f} s (< 10 s)", evaluations, worst, secs));
}

void biconjugation() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const SampledFunction f = random_convex(rng);
        const SampledFunction ff = biconjugate(f);
        for (std::size_t k = 0; k < f.size(); ++k)
            worst = std::max(worst, std::abs(ff.values()[k] - f.values()[k]));
    }
    std::vector<double> x(401), f(401);
    for (int k = 0; k <= 400; ++k) {
        x[k] = -2.0 + 0.01 * k;
        f[k] = (x[k] * x[k] - 1.0) * (x[k] * x[k] - 1.0);
    }
    const SampledFunction well(x, f);
    const SampledFunction env = biconjugate(well);
    const auto hull = oracle::brute_envelope(x, f);
    double hull_err = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        hull_err = std::max(hull_err, std::abs(env.values()[k] - hull[k]));
    const double secs = seconds_since(t0);
    report(2, "biconjugation", worst <= 1e-10 && hull_err <= 1e-12 && secs < 10.0,
           fmt::format("100 convex: max |f**-f| {:.3e} (<= 1e-10); double well vs brute hull {:.3e}; {:.2f} s",
                       worst, hull_err, secs));
}

void splitting_identity() {
    const StudyConfig c = config("obstacle_1d.ini");
    const auto ref = make_analytic_reference(c.reference.name, c.problem);
    bool ok = true;
    std::string detail;
    for (Index n : {64, 256}) {
        const auto sys = assemble(c.problem, mesh_of(c.problem, c.subdivisions(n)));
        const MixedSolution m = solve_mixed(sys);
        const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
        ledger.add(m.u, dual, sys, true);
        const GcreReport r = bound_report(m.u, dual, sys, ref.get());
        const ErrorSplit &s = *r.split;
        const double mismatch = std::abs(r.energy.psi - s.phi_bar - s.phi_bar_star);
        const bool lvl = mismatch <= 1e-8 * r.scale && s.phi_bar >= s.primal_error - 1e-8 &&
                         s.phi_bar_star >= s.dual_error - 1e-8;
        ok = ok && lvl;
        detail += fmt::format("h=1/{}: |psi-phi-phi*| {:.2e}, phi {:.4e} >= {:.4e}, phi* {:.4e} >= {:.4e}; ",
                              n / 4, mismatch, s.phi_bar, s.primal_error, s.phi_bar_star,
                              s.dual_error);
    }
    report(4, "splitting identity", ok, detail);
}

// Study rows for the obstacle and Tresca benchmarks, shared by criteria 5 and 6.
struct Studies {
    StudyResult obstacle, tresca;
    double seconds = 0.0;
};

Studies run_benchmarks() {
    Studies s;
    const auto t0 = Clock::now();
    StudyConfig o = config("obstacle_1d.ini");
    o.levels = {32, 64, 128, 256, 512};
    s.obstacle = run_study(o, {true, 17});
    StudyConfig t = config("tresca.ini");
    t.levels = {8, 16, 32, 64};
    t.reference.factor = 8;
    s.tresca = run_study(t, {true, 17});
    s.seconds = seconds_since(t0);
    return s;
}

void upper_bound(const Studies &s) {
    bool ok = s.obstacle.failures.empty() && s.tresca.failures.empty();
    std::string detail;
    auto check = [&](const StudyResult &r, const char *name, double hmax) {
        detail += fmt::format("{}:", name);
        for (const StudyRow &row : r.rows) {
            if (row.h > hmax + 1e-15 || row.h < 1.0 / 64 - 1e-15)
                continue;
            const double eff = row.effectivity.value_or(std::nan(""));
            ok = ok && row.bound_ok && eff >= 1.0 && eff <= 10.0;
            detail += fmt::format(" h={:.4g} eff={:.4f}{}", row.h, eff, row.bound_ok ? "" : " (bound violated)");
        }
        detail += "; ";
    };
    check(s.obstacle, "obstacle_1d", 1.0 / 8);
    check(s.tresca, "tresca", 1.0 / 8);
    ok = ok && s.seconds < 180.0;
    detail += fmt::format("both studies {:.1f} s (< 180 s)", s.seconds);
    report(5, "guaranteed upper bound", ok, detail);
}

void convergence(const Studies &s) {
    std::vector<double> h, err, psi;
    for (const StudyRow &row : s.obstacle.rows) {
        h.push_back(row.h);
        err.push_back(row.ref_error.value_or(std::nan("")));
        psi.push_back(row.psi);
    }
    const double se = loglog_slope(h, err), sp = loglog_slope(h, psi);
    const bool ok = h.size() >= 3 && se >= 1.6 && se <= 2.4 && sp >= 1.6 && sp <= 2.4;
    report(6, "convergence", ok,
           fmt::format("obstacle_1d over {} levels: squared energy error slope {:.3f}, psi slope {:.3f} (in [1.6, 2.4]); energy-norm slope {:.3f}",
                       h.size(), se, sp, se / 2.0));
}

void complementarity_check() {
    bool ok = true;
    double worst = 0.0;
    int levels = 0;
    auto run = [&](const StudyConfig &c, std::vector<Index> ns) {
        for (Index n : ns) {
            const auto sys = assemble(c.problem, mesh_of(c.problem, c.subdivisions(n)));
            const MixedSolution m = solve_mixed(sys, c.solver);
            const ComplementarityResidual r = complementarity(sys, m);
            const double rel = std::max(r.normal, r.friction) / r.scale;
            worst = std::max(worst, rel);
            ok = ok && r.normal <= 1e-8 * r.scale && r.friction <= 1e-8 * r.scale;
            ++levels;

            // Certified pairs for the energy-sum ledger, optimal and perturbed.
            const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
            ledger.add(m.u, dual, sys, true);
            std::mt19937_64 rng(static_cast<std::uint64_t>(n));
            std::normal_distribution<double> z(0.0, 1.0);
            for (int t = 0; t < 4; ++t) {
                FeField v = m.u;
                const double amp = 0.05 * (1.0 + m.u.values.lpNorm<Eigen::Infinity>());
                for (Index i = 0; i < v.values.size(); ++i)
                    if (!sys.dirichlet_mask[i])
                        v.values[i] += amp * z(rng);
                v = make_kinematically_admissible(v, sys);
                ledger.add(v, dual, sys, false);
            }
            if (sys.problem.has_obstacle()) {
                Eigen::VectorXd r2 = dual.cell_reaction;
                for (Index k = 0; k < r2.size(); ++k)
                    r2[k] = std::max(0.0, r2[k] + 0.5 * std::abs(z(rng)));
                ledger.add(m.u, recover_scalar_dual(sys, r2), sys, false);
            } else {
                ContactTraction ct = dual.contact;
                for (Index k = 0; k < ct.normal.size(); ++k) {
                    ct.normal[k] = std::min(0.0, ct.normal[k] - 0.01 * std::abs(z(rng)));
                    ct.tangential[k] = std::clamp(ct.tangential[k] + 0.01 * z(rng), -0.02, 0.02);
                }
                ledger.add(m.u, recover_elastic_dual(sys, ct), sys, false);
            }
        }
    };
    run(config("obstacle_1d.ini"), {32, 64, 128, 256, 512});
    run(config("tresca.ini"), {8, 16, 32, 64});
    report(7, "complementarity", ok,
           fmt::format("{} benchmark levels, worst residual / scale {:.3e} (<= 1e-8)", levels, worst));
}

void inactive_reduction() {
    bool ok = true;
    std::string detail;
    auto run = [&](const ProblemSpec &p, std::array<Index, 2> n, const char *name) {
        const auto sys = assemble(p, mesh_of(p, n));
        const MixedSolution m = solve_mixed(sys);
        const FeField lin = solve_linear(sys);
        const double nodal = (m.u.values - lin.values).lpNorm<Eigen::Infinity>();
        const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
        ledger.add(m.u, dual, sys, true);
        const double psi = gcre::gcre(m.u, dual, sys).psi;
        const double classic = classic_cre_linear(m.u, dual, sys);
        ok = ok && nodal <= 1e-10 && std::abs(psi - classic) <= 1e-10;
        detail += fmt::format("{}: nodal {:.2e}, |psi - classic| {:.2e} (psi {:.4e}); ", name, nodal,
                              std::abs(psi - classic), psi);
    };
    StudyConfig t = config("tresca.ini");
    t.problem.obstacle = constant_field(1e6);
    t.problem.friction = constant_field(0.0);
    t.problem.body_force = {constant_field(0.3), constant_field(-1.0)};
    run(t.problem, t.subdivisions(16), "tresca");

    ProblemSpec o;
    o.kind = ProblemKind::obstacle_2d;
    o.geometry = Rectangle{1.0, 1.0};
    o.orientation = ConeOrientation::above;
    o.obstacle = constant_field(1e6);
    o.body_force = {expression_field(Expression("1 + x*y")), constant_field(0.0)};
    run(o, {8, 8}, "obstacle_2d");

    StudyConfig o1 = config("obstacle_1d.ini");
    o1.problem.obstacle = constant_field(-1e6);
    o1.problem.body_force = {constant_field(1.0), constant_field(0.0)};
    run(o1.problem, o1.subdivisions(32), "obstacle_1d");
    report(8, "inactive-constraint reduction", ok, detail);
}

void tiny_oracles() {
    bool ok = true;
    std::string detail;
    auto run = [&](const ProblemSpec &p, std::array<Index, 2> n, const char *name) {
        const auto sys = assemble(p, mesh_of(p, n));
        const MixedSolution m = solve_mixed(sys);
        const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
        ledger.add(m.u, dual, sys, true);
        const Eigen::VectorXd kkt = oracle::dense_flux_kkt(sys, dual.cell_reaction);
        const double err = (std::get<Rt0Flux>(dual.flux).values() - kkt).lpNorm<Eigen::Infinity>();
        ok = ok && sys.mesh->num_cells() <= 12 && err <= 1e-10;
        detail += fmt::format("{} ({} cells, active reaction {:.3f}): {:.2e}; ", name,
                              sys.mesh->num_cells(), dual.cell_reaction.lpNorm<Eigen::Infinity>(), err);
    };
    StudyConfig o1 = config("obstacle_1d.ini");
    run(o1.problem, {12, 0}, "obstacle_1d");
    ProblemSpec o;
    o.kind = ProblemKind::obstacle_2d;
    o.geometry = Rectangle{1.0, 1.5};
    o.tags.right = BoundaryTag::neumann;
    o.obstacle = expression_field(Expression("0.05 - (x-0.5)^2 - (y-0.75)^2"));
    o.constraint_curvature = 2.0;
    o.body_force = {constant_field(-3.0), constant_field(0.0)};
    o.traction = {expression_field(Expression("0.5*y")), constant_field(0.0)};
    run(o, {2, 3}, "obstacle_2d");

    std::mt19937_64 rng(9);
    double cerr = 0.0;
    for (int t = 0; t < 200; ++t) {
        const SampledFunction f = random_convex(rng);
        std::vector<double> x(f.grid().begin(), f.grid().end()), v(f.values().begin(), f.values().end());
        std::normal_distribution<double> z(0.0, 1.0);
        for (double &y : v)
            y += z(rng); // conjugates of non-convex samples as well
        const SampledFunction g(x, v);
        const auto slopes = conjugate_slopes(f, 50);
        const SampledFunction gs = discrete_conjugate(g, slopes);
        const auto brute = oracle::brute_conjugate(x, v, slopes);
        for (std::size_t k = 0; k < slopes.size(); ++k)
            cerr = std::max(cerr, std::abs(gs.values()[k] - brute[k]) / (1.0 + std::abs(brute[k])));
    }
    ok = ok && cerr <= 1e-13;
    detail += fmt::format("discrete conjugate vs brute force {:.2e} (<= 1e-13)", cerr);
    report(9, "oracle equivalence on tiny instances", ok, detail);
}

} // namespace

int main() {
    guarded(1, "Fenchel-Young nonnegativity", fenchel_young);
    guarded(2, "biconjugation", biconjugation);
    guarded(4, "splitting identity", splitting_identity);
    Studies studies;
    bool have_studies = false;
    try {
        studies = run_benchmarks();
        have_studies = true;
    } catch (const std::exception &e) {
        report(5, "guaranteed upper bound", false, fmt::format("exception: {}", e.what()));
        report(6, "convergence", false, "no study data");
    }
    if (have_studies) {
        guarded(5, "guaranteed upper bound", [&] { upper_bound(studies); });
        guarded(6, "convergence", [&] { convergence(studies); });
    }
    guarded(7, "complementarity", complementarity_check);
    guarded(8, "inactive-constraint reduction", inactive_reduction);
    guarded(9, "oracle equivalence on tiny instances", tiny_oracles);
    report(3, "energy-sum identity", ledger.pairs >= 50 && ledger.worst <= 1e-10,
           fmt::format("{} certified pairs ({} non-optimal), worst |psi-Fp-Fc|/(1+|psi|) {:.3e} (<= 1e-10)",
                       ledger.pairs, ledger.perturbed, ledger.worst));
    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
