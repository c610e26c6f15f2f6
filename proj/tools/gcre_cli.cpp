#include "gcre/study.hpp"

#include "gcre/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace {

struct Overrides {
    std::vector<gcre::Index> levels;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<std::string> out;
};

gcre::StudyConfig load(const std::string &path, const Overrides &o) {
    gcre::StudyConfig c = gcre::load_config(path);
    if (!o.levels.empty())
        c.levels = o.levels;
    if (o.tol)
        c.solver.tol = *o.tol;
    if (o.max_iter)
        c.solver.max_iter = *o.max_iter;
    if (o.out)
        c.output = *o.out;
    c.validate();
    return c;
}

void add_common(CLI::App *cmd, std::string &config, Overrides &o) {
    cmd->add_option("config", config, "study configuration (INI)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--levels", o.levels, "mesh levels (cells along x), overrides the config")
        ->delimiter(',');
    cmd->add_option("--tol", o.tol, "solver tolerance");
    cmd->add_option("--max-iter", o.max_iter, "solver iteration limit");
    cmd->add_option("--out", o.out, "output directory");
}

int run(const std::string &path, const Overrides &o, std::optional<std::uint64_t> seed,
        bool deterministic) {
    const gcre::StudyConfig c = load(path, o);
    gcre::StudyOptions opts;
    opts.seed = seed;
    opts.deterministic = deterministic;
    const gcre::StudyResult result = gcre::run_study(c, opts);
    for (const auto &f : result.failures)
        fmt::print(stderr, "level {} failed in {}: {}\n", f.level, f.stage, f.message);
    if (result.rows.empty()) {
        fmt::print(stderr, "no level completed\n");
        return 1;
    }
    gcre::emit_report(result, c.output);
    std::cout << gcre::format_csv(result.rows);
    return result.all_bounds_ok() ? 0 : 1;
}

int reference(const std::string &path, const Overrides &o) {
    const gcre::StudyConfig c = load(path, o);
    const gcre::MixedSolution m = gcre::compute_reference(c);
    std::filesystem::create_directories(c.output);
    const auto file = c.output / "reference.dat";
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write '{}'", file.string()));
    const gcre::Mesh &mesh = *m.u.mesh;
    out << "# x y u...\n";
    for (gcre::Index v = 0; v < mesh.num_vertices(); ++v) {
        out << fmt::format("{:.17g} {:.17g}", mesh.vertex(v)[0], mesh.vertex(v)[1]);
        for (int k = 0; k < m.u.components; ++k)
            out << fmt::format(" {:.17g}", m.u(v, k));
        out << '\n';
    }
    fmt::print("reference written to {} ({} vertices)\n", file.string(), mesh.num_vertices());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Generalized constitutive relation error studies"};
    app.require_subcommand(1);
    std::string config;
    Overrides o;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;

    auto *run_cmd = app.add_subcommand("run", "run a refinement study");
    add_common(run_cmd, config, o);
    run_cmd->add_option("--seed", seed, "seed for randomized identity self-checks");
    run_cmd->add_flag("--deterministic", deterministic, "write zero runtimes");

    auto *ref_cmd = app.add_subcommand("reference", "compute the reference on the finest level");
    add_common(ref_cmd, config, o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (run_cmd->parsed())
            return run(config, o, seed, deterministic);
        return reference(config, o);
    } catch (const gcre::InvalidInput &e) {
        fmt::print(stderr, "invalid input: {}\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
