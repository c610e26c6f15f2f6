#include "gcre/study.hpp"

#include "gcre/error.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace gcre {

const char *const csv_header =
    "h,dofs,psi,f_p,f_c,identity_residual,ref_error,effectivity,bound_ok,runtime_ms";

namespace {

std::shared_ptr<const Mesh> level_mesh(const StudyConfig &c, Index level) {
    return std::make_shared<const Mesh>(build_mesh(c.problem.geometry, c.subdivisions(level),
                                                   c.problem.tags));
}

std::string number(std::optional<double> v) {
    return v ? fmt::format("{:.17g}", *v) : std::string("nan");
}

void write_atomic(const std::filesystem::path &path, const std::string &content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error(fmt::format("write failed for '{}'", tmp.string()));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error(fmt::format("cannot rename '{}': {}", tmp.string(), ec.message()));
}

// Identity residual of randomly perturbed admissible pairs; returns the worst
// relative residual.
double random_identity_check(const DiscreteSystem &sys, const FeField &u_hat,
                             const AdmissibleDual &dual, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double amp = 0.1 * std::max(1e-3, u_hat.values.lpNorm<Eigen::Infinity>());
    double worst = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        FeField v = u_hat;
        for (Index i = 0; i < v.values.size(); ++i)
            if (!sys.dirichlet_mask[i])
                v.values[i] += amp * normal(rng);
        v = make_kinematically_admissible(v, sys);
        const EnergyTriple e = gcre(v, dual, sys);
        worst = std::max(worst, e.identity_residual / (1.0 + std::abs(e.psi)));
    }
    return worst;
}

} // namespace

bool StudyResult::all_bounds_ok() const {
    if (!failures.empty() || rows.empty())
        return false;
    for (const auto &r : rows)
        if (!r.bound_ok)
            return false;
    return true;
}

std::unique_ptr<ReferenceSolution> make_reference(const StudyConfig &c) {
    switch (c.reference.kind) {
    case ReferenceMode::Kind::none:
        return nullptr;
    case ReferenceMode::Kind::analytic:
        return make_analytic_reference(c.reference.name, c.problem);
    case ReferenceMode::Kind::overkill:
        return make_overkill_reference(c.problem, *level_mesh(c, c.levels.back()),
                                       c.reference.factor, c.solver);
    }
    return nullptr;
}

MixedSolution compute_reference(const StudyConfig &c) {
    if (c.reference.kind == ReferenceMode::Kind::none)
        throw Misuse("compute_reference: no reference mode configured");
    const auto ref = make_reference(c);
    const DiscreteSystem sys = assemble(c.problem, level_mesh(c, c.levels.back()));
    return ref->restrict_to(sys);
}

StudyResult run_study(const StudyConfig &c, const StudyOptions &options) {
    c.validate();
    StudyResult result;
    std::unique_ptr<ReferenceSolution> ref;
    bool reference_failed = false;
    try {
        ref = make_reference(c);
        result.reference = ref ? ref->description() : "none";
    } catch (const std::exception &e) {
        reference_failed = true;
        result.reference = "failed";
        result.failures.push_back({c.levels.back(), "reference", e.what()});
    }
    for (Index level : c.levels) {
        const auto start = std::chrono::steady_clock::now();
        std::string stage = "mesh";
        try {
            const auto mesh = level_mesh(c, level);
            stage = "assemble";
            const DiscreteSystem sys = assemble(c.problem, mesh);
            check_dirichlet_feasibility(sys);
            stage = "solve";
            const PrimalSolution sol = solve_primal(sys, c.solver);
            stage = "multipliers";
            MixedSolution mixed = extract_multipliers(sys, sol.u);
            const FeField u_hat = make_kinematically_admissible(sol.u, sys);
            mixed.u = u_hat;
            stage = "recovery";
            const AdmissibleDual dual = recover_equilibrated_dual(sys, mixed);
            stage = "estimate";
            const GcreReport rep = bound_report(u_hat, dual, sys, ref.get());
            std::string note = fmt::format(
                "n={}: {} iterations, membership certified, oscillation {:.3e}", level,
                sol.iterations, rep.data_oscillation);
            bool self_check = true;
            if (options.seed) {
                stage = "self-check";
                const double worst =
                    random_identity_check(sys, u_hat, dual, *options.seed + static_cast<std::uint64_t>(level));
                self_check = worst <= 1e-10;
                note += fmt::format(", random identity residual {:.3e}", worst);
            }
            if (rep.split)
                note += fmt::format(", phi_bar {:.6e}, phi_bar* {:.6e}, cross {:.3e}, dual error {:.6e}",
                                    rep.split->phi_bar, rep.split->phi_bar_star,
                                    rep.split->cross_term, rep.split->dual_error);
            const auto stop = std::chrono::steady_clock::now();

            StudyRow row;
            row.h = mesh->grid()->hx;
            row.dofs = sys.num_dofs();
            row.psi = rep.energy.psi;
            row.f_p = rep.energy.f_p;
            row.f_c = rep.energy.f_c;
            row.identity_residual = rep.energy.identity_residual;
            row.ref_error = rep.reference_error;
            row.effectivity = rep.effectivity;
            row.bound_ok = rep.bound_ok && self_check && !reference_failed &&
                           rep.energy.identity_residual <= 1e-10 * (1.0 + std::abs(rep.energy.psi));
            row.runtime_ms = options.deterministic
                                 ? 0.0
                                 : std::chrono::duration<double, std::milli>(stop - start).count();
            result.rows.push_back(row);
            result.notes.push_back(std::move(note));
        } catch (const std::exception &e) {
            result.failures.push_back({level, stage, e.what()});
        }
    }
    return result;
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0))
            continue;
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2)
        return std::nan("");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string format_csv(const std::vector<StudyRow> &rows) {
    std::string out = csv_header;
    out += '\n';
    for (const auto &r : rows)
        out += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{:.17g}\n", r.h,
                           r.dofs, r.psi, r.f_p, r.f_c, r.identity_residual, number(r.ref_error),
                           number(r.effectivity), r.bound_ok ? "true" : "false", r.runtime_ms);
    return out;
}

std::vector<StudyRow> parse_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line != csv_header)
        throw InvalidInput("csv: missing or unexpected header");
    std::vector<StudyRow> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 10)
            throw InvalidInput(fmt::format("csv: expected 10 fields in '{}'", line));
        auto num = [&](std::size_t k) {
            char *end = nullptr;
            const double v = std::strtod(cells[k].c_str(), &end);
            if (end == cells[k].c_str() || *end != '\0')
                throw InvalidInput(fmt::format("csv: bad number '{}'", cells[k]));
            return v;
        };
        auto opt = [&](std::size_t k) -> std::optional<double> {
            if (cells[k] == "nan")
                return std::nullopt;
            return num(k);
        };
        StudyRow r;
        r.h = num(0);
        r.dofs = static_cast<Index>(num(1));
        r.psi = num(2);
        r.f_p = num(3);
        r.f_c = num(4);
        r.identity_residual = num(5);
        r.ref_error = opt(6);
        r.effectivity = opt(7);
        if (cells[8] != "true" && cells[8] != "false")
            throw InvalidInput(fmt::format("csv: bad flag '{}'", cells[8]));
        r.bound_ok = cells[8] == "true";
        r.runtime_ms = num(9);
        rows.push_back(r);
    }
    return rows;
}

void emit_report(const StudyResult &result, const std::filesystem::path &dir) {
    if (result.rows.empty())
        throw InvalidInput("emit_report: no rows to write");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    write_atomic(dir / "study.csv", format_csv(result.rows));

    std::vector<double> h, err, psi;
    std::string dat = "# h dofs psi ref_error effectivity\n";
    for (const auto &r : result.rows) {
        h.push_back(r.h);
        psi.push_back(r.psi);
        err.push_back(r.ref_error.value_or(std::nan("")));
        dat += fmt::format("{:.17g} {} {:.17g} {} {}\n", r.h, r.dofs, r.psi, number(r.ref_error),
                           number(r.effectivity));
    }
    const double psi_slope = loglog_slope(h, psi), err_slope = loglog_slope(h, err);
    dat += fmt::format("# slope log(psi)/log(h) {:.6f}\n# slope log(ref_error)/log(h) {:.6f}\n",
                       psi_slope, err_slope);
    write_atomic(dir / "convergence.dat", dat);

    std::string s = fmt::format("reference: {}\n\n", result.reference);
    s += fmt::format("{:>12} {:>8} {:>14} {:>14} {:>14} {:>10} {:>9} {:>10}\n", "h", "dofs", "psi",
                     "ref_error", "identity", "effect.", "bound_ok", "ms");
    for (const auto &r : result.rows)
        s += fmt::format("{:>12.5e} {:>8} {:>14.6e} {:>14} {:>14.3e} {:>10} {:>9} {:>10.1f}\n", r.h,
                         r.dofs, r.psi,
                         r.ref_error ? fmt::format("{:.6e}", *r.ref_error) : std::string("-"),
                         r.identity_residual,
                         r.effectivity ? fmt::format("{:.4f}", *r.effectivity) : std::string("-"),
                         r.bound_ok ? "yes" : "NO", r.runtime_ms);
    s += fmt::format("\nslope psi {:.4f}, slope ref_error {:.4f}\n", psi_slope, err_slope);
    if (!result.notes.empty()) {
        s += "\nlevels:\n";
        for (const auto &n : result.notes)
            s += "  " + n + "\n";
    }
    s += fmt::format("\nfailures: {}\n", result.failures.size());
    for (const auto &f : result.failures)
        s += fmt::format("  n={} [{}] {}\n", f.level, f.stage, f.message);
    write_atomic(dir / "summary.txt", s);
}

} // namespace gcre
