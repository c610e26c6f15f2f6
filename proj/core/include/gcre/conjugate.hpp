#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gcre {

/// How a sampled function continues beyond its grid.
enum class Extension {
    infinite_outside, ///< +inf outside [grid.front(), grid.back()]
    linear_outside,   ///< affine continuation with the end-segment slopes
};

/// Values of a scalar function on a strictly increasing grid.
///
/// Between grid points the function is the piecewise-linear interpolant.
class SampledFunction {
  public:
    SampledFunction() = default;
    SampledFunction(std::vector<double> grid, std::vector<double> values,
                    Extension extension = Extension::infinite_outside);

    std::span<const double> grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    Extension extension() const { return extension_; }
    std::size_t size() const { return grid_.size(); }

    /// Piecewise-linear evaluation; +inf outside the grid for infinite_outside.
    double operator()(double x) const;

  private:
    std::vector<double> grid_;
    std::vector<double> values_;
    Extension extension_ = Extension::infinite_outside;
};

/// Discrete Legendre-Fenchel transform evaluated at sorted `slopes`.
///
/// f*(s) = max_j (s x_j - f_j). The result is sampled on `slopes` with
/// linear_outside extension when `f` is infinite outside its grid. For a
/// linear_outside input the transform is finite only for slopes between the
/// two end-segment slopes; other slopes raise std::domain_error and the
/// result is infinite_outside.
SampledFunction discrete_conjugate(const SampledFunction &f, std::span<const double> slopes);

/// f(x) + f*(y) - x y, evaluated with piecewise-linear interpolation.
double fenchel_young_gap(const SampledFunction &f, const SampledFunction &f_star, double x,
                         double y);

struct GapEvaluation {
    double primal_point;
    double dual_point;
    double gap;
};

GapEvaluation evaluate_gap(const SampledFunction &f, const SampledFunction &f_star, double x,
                           double y);

/// Indices of the vertices of the lower convex hull of (grid, values).
///
/// Collinear and upper points are excluded; the orientation test is exact.
std::vector<std::size_t> lower_hull(std::span<const double> grid, std::span<const double> values);

/// f** on the grid of `f`: the lower convex envelope of the samples.
///
/// Hull vertices keep their sampled value, other nodes receive the conjugate
/// of the conjugate rounded up onto the hull chord, so the map is
/// idempotent bit for bit.
SampledFunction biconjugate(const SampledFunction &f);

} // namespace gcre
