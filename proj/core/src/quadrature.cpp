#include "gcre/quadrature.hpp"

#include "gcre/error.hpp"

#include <cmath>
#include <numbers>

namespace gcre {

namespace {

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
void legendre_rule(int n, std::vector<double> &nodes, std::vector<double> &weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1)
                p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        nodes[i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

} // namespace

std::vector<QuadraturePoint> gauss_interval(int n) {
    if (n < 1)
        throw InvalidInput("quadrature: need at least one point");
    std::vector<double> z, w;
    legendre_rule(n, z, w);
    std::vector<QuadraturePoint> rule(n);
    for (int i = 0; i < n; ++i)
        rule[i] = {{0.5 * (1.0 - z[i]), 0.0}, 0.5 * w[i]};
    return rule;
}

std::vector<QuadraturePoint> gauss_triangle(int n) {
    const auto line = gauss_interval(n);
    std::vector<QuadraturePoint> rule;
    rule.reserve(line.size() * line.size());
    for (const auto &a : line)
        for (const auto &b : line) {
            const double s = a.ref[0];
            rule.push_back({{s, b.ref[0] * (1.0 - s)}, a.weight * b.weight * (1.0 - s)});
        }
    return rule;
}

std::vector<QuadraturePoint> gauss_square(int n) {
    const auto line = gauss_interval(n);
    std::vector<QuadraturePoint> rule;
    rule.reserve(line.size() * line.size());
    for (const auto &a : line)
        for (const auto &b : line)
            rule.push_back({{a.ref[0], b.ref[0]}, a.weight * b.weight});
    return rule;
}

} // namespace gcre
