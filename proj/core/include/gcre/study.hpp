#pragma once

#include "gcre/config.hpp"
#include "gcre/reference.hpp"

#include <cstdint>
#include <optional>

namespace gcre {

/// One CSV row of a refinement study.
struct StudyRow {
    double h = 0.0;
    Index dofs = 0;
    double psi = 0.0;
    double f_p = 0.0;
    double f_c = 0.0;
    double identity_residual = 0.0;
    std::optional<double> ref_error;
    std::optional<double> effectivity;
    bool bound_ok = false;
    double runtime_ms = 0.0;

    bool operator==(const StudyRow &) const = default;
};

struct LevelFailure {
    Index level = 0;
    std::string stage;
    std::string message;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::vector<LevelFailure> failures;
    std::vector<std::string> notes; ///< per-level diagnostics for the summary
    std::string reference;

    /// True iff every level produced a row and every bound check passed.
    bool all_bounds_ok() const;
};

struct StudyOptions {
    bool deterministic = false; ///< write zero runtimes
    std::optional<std::uint64_t> seed; ///< randomized identity self-checks per level
};

StudyResult run_study(const StudyConfig &config, const StudyOptions &options = {});

/// Reference solution restricted to the finest level of the study.
MixedSolution compute_reference(const StudyConfig &config);

/// Reference object used by run_study (nullptr when the mode is none).
std::unique_ptr<ReferenceSolution> make_reference(const StudyConfig &config);

extern const char *const csv_header;

/// Least-squares slope of log(y) against log(x) over entries with y > 0.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

std::string format_csv(const std::vector<StudyRow> &rows);
std::vector<StudyRow> parse_csv(std::istream &is);

/// Writes study.csv, summary.txt and convergence.dat into `directory`; each
/// file is written to a temporary name and renamed. Throws InvalidInput on
/// empty rows and std::runtime_error on I/O failure.
void emit_report(const StudyResult &result, const std::filesystem::path &directory);

} // namespace gcre
