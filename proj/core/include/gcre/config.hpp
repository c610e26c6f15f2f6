#pragma once

#include "gcre/problem.hpp"
#include "gcre/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gcre {

struct ReferenceMode {
    enum class Kind { none, analytic, overkill };
    Kind kind = Kind::none;
    std::string name; ///< closed form name (analytic)
    Index factor = 8; ///< refinement factor (overkill)
};

/// A refinement study read from an INI file.
///
///   [problem]   kind, domain, left/right/bottom/top, orientation,
///               dimension (linear_poisson only, default 1)
///   [material]  young, poisson  or  lambda, mu
///   [data]      body_force_x/y, traction_x/y, dirichlet_x/y, obstacle,
///               curvature, friction  (expressions in x, y)
///   [study]     name, levels, reference (none | analytic:<name> | overkill:<factor>)
///   [solver]    tol, max_iter
///   [output]    directory
///
/// Levels count cells along x; the y count follows the aspect ratio.
struct StudyConfig {
    std::string name = "study";
    ProblemSpec problem;
    std::vector<Index> levels;
    ReferenceMode reference;
    SolverOptions solver;
    std::filesystem::path output = "out";

    /// Subdivisions of one level.
    std::array<Index, 2> subdivisions(Index level) const;
    /// Throws InvalidInput on non-increasing levels or an overkill factor below 4.
    void validate() const;
};

StudyConfig parse_config(std::istream &is);
StudyConfig load_config(const std::filesystem::path &path);

} // namespace gcre
