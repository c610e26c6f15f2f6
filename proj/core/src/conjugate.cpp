#include "gcre/conjugate.hpp"

#include "gcre/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gcre {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Sign of (b - a) x (c - a); exact, with a floating-point filter.
int orientation(double ax, double ay, double bx, double by, double cx, double cy) {
    const double left = (bx - ax) * (cy - ay);
    const double right = (by - ay) * (cx - ax);
    const double det = left - right;
    constexpr double eps = std::numeric_limits<double>::epsilon() / 2;
    const double bound = (3.0 + 16.0 * eps) * eps * (std::abs(left) + std::abs(right));
    if (det > bound)
        return 1;
    if (-det > bound)
        return -1;
    using boost::multiprecision::cpp_rational;
    const cpp_rational Ax(ax), Ay(ay), Bx(bx), By(by), Cx(cx), Cy(cy);
    const cpp_rational exact = (Bx - Ax) * (Cy - Ay) - (By - Ay) * (Cx - Ax);
    return exact.sign();
}

void check_grid(std::span<const double> grid, const char *what) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw InvalidInput(std::string(what) + ": non-finite grid point");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw InvalidInput(std::string(what) + ": grid must be strictly increasing");
    }
}

double interpolate(std::span<const double> x, std::span<const double> v, Extension ext,
                   double at) {
    const std::size_t n = x.size();
    if (n == 0)
        return inf;
    if (at < x.front() || at > x.back()) {
        if (ext == Extension::infinite_outside || n == 1)
            return (n == 1 && at == x.front()) ? v.front() : inf;
        if (at < x.front())
            return v[0] + (v[1] - v[0]) / (x[1] - x[0]) * (at - x[0]);
        return v[n - 1] + (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]) * (at - x[n - 1]);
    }
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    if (it == x.end())
        return v[n - 1];
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    if (k == 0)
        return v[0];
    const double t = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - t) * v[k - 1] + t * v[k];
}

} // namespace

SampledFunction::SampledFunction(std::vector<double> grid, std::vector<double> values,
                                 Extension extension)
    : grid_(std::move(grid)), values_(std::move(values)), extension_(extension) {
    if (grid_.size() != values_.size())
        throw InvalidInput("sampled function: grid and values differ in length");
    if (grid_.size() < 2)
        throw InvalidInput("sampled function: needs at least two samples");
    check_grid(grid_, "sampled function");
    for (double v : values_)
        if (!std::isfinite(v))
            throw InvalidInput("sampled function: non-finite value");
}

double SampledFunction::operator()(double x) const {
    return interpolate(grid_, values_, extension_, x);
}

std::vector<std::size_t> lower_hull(std::span<const double> grid,
                                    std::span<const double> values) {
    std::vector<std::size_t> hull;
    hull.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t o = hull[hull.size() - 2], a = hull.back();
            if (orientation(grid[o], values[o], grid[a], values[a], grid[i], values[i]) > 0)
                break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    return hull;
}

SampledFunction discrete_conjugate(const SampledFunction &f, std::span<const double> slopes) {
    if (slopes.size() < 2)
        throw InvalidInput("conjugate: needs at least two slopes");
    check_grid(slopes, "conjugate slopes");
    const auto x = f.grid();
    const auto v = f.values();
    const std::size_t n = x.size();

    if (f.extension() == Extension::linear_outside) {
        const double lo = (v[1] - v[0]) / (x[1] - x[0]);
        const double hi = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
        if (slopes.front() < lo || slopes.back() > hi)
            throw std::domain_error("conjugate: slope outside the effective domain of f*");
    }

    const auto hull = lower_hull(x, v);
    std::vector<double> out(slopes.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        const double s = slopes[i];
        double best = s * x[hull[k]] - v[hull[k]];
        while (k + 1 < hull.size()) {
            const double next = s * x[hull[k + 1]] - v[hull[k + 1]];
            if (next < best)
                break;
            best = next;
            ++k;
        }
        out[i] = best;
    }
    const Extension ext = f.extension() == Extension::infinite_outside
                              ? Extension::linear_outside
                              : Extension::infinite_outside;
    return SampledFunction({slopes.begin(), slopes.end()}, std::move(out), ext);
}

double fenchel_young_gap(const SampledFunction &f, const SampledFunction &f_star, double x,
                         double y) {
    const double fx = f(x);
    const double fy = f_star(y);
    if (std::isinf(fx) || std::isinf(fy))
        return inf;
    return fx + fy - x * y;
}

GapEvaluation evaluate_gap(const SampledFunction &f, const SampledFunction &f_star, double x,
                           double y) {
    return {x, y, fenchel_young_gap(f, f_star, x, y)};
}

SampledFunction biconjugate(const SampledFunction &f) {
    const auto x = f.grid();
    const auto v = f.values();
    const std::size_t n = x.size();
    const auto hull = lower_hull(x, v);
    std::vector<double> out(v.begin(), v.end());
    if (hull.size() < 2)
        return SampledFunction({x.begin(), x.end()}, std::move(out), f.extension());

    std::vector<double> slopes;
    slopes.reserve(hull.size() + 1);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const std::size_t a = hull[k], b = hull[k + 1];
        const double s = (v[b] - v[a]) / (x[b] - x[a]);
        if (slopes.empty() || s > slopes.back())
            slopes.push_back(s);
    }
    const double span = std::max(1.0, std::abs(slopes.back() - slopes.front()));
    slopes.insert(slopes.begin(), slopes.front() - span);
    slopes.push_back(slopes.back() + span);

    std::vector<double> hx, hv;
    for (std::size_t idx : hull) {
        hx.push_back(x[idx]);
        hv.push_back(v[idx]);
    }
    const SampledFunction vertices(std::move(hx), std::move(hv), Extension::infinite_outside);
    const SampledFunction star = discrete_conjugate(vertices, slopes);
    const SampledFunction star_finite({star.grid().begin(), star.grid().end()},
                                      {star.values().begin(), star.values().end()},
                                      Extension::infinite_outside);
    const SampledFunction envelope = discrete_conjugate(star_finite, x);

    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (seg < hull.size() && hull[seg] == j) {
            ++seg;
            continue;
        }
        const std::size_t a = hull[seg - 1], b = hull[seg];
        double value = envelope.values()[j];
        // Round up until the point is not below the chord a-b.
        int steps = 0;
        while (orientation(x[a], v[a], x[b], v[b], x[j], value) < 0) {
            if (++steps > 64) {
                const double t = (x[j] - x[a]) / (x[b] - x[a]);
                value = std::max(value, (1.0 - t) * v[a] + t * v[b]);
                steps = 0;
            }
            value = std::nextafter(value, inf);
        }
        out[j] = value;
    }
    return SampledFunction({x.begin(), x.end()}, std::move(out), f.extension());
}

} // namespace gcre
