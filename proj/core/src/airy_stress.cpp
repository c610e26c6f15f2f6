#include "gcre/error.hpp"
#include "gcre/flux.hpp"

#include <algorithm>
#include <cmath>

namespace gcre {

namespace {

// Cubic Hermite functions on [0, 1] and their first two derivatives:
// index 0 value at 0, 1 slope at 0, 2 value at 1, 3 slope at 1.
struct Hermite {
    double f[4], d1[4], d2[4];

    explicit Hermite(double t) {
        const double t2 = t * t, t3 = t2 * t;
        f[0] = 1.0 - 3.0 * t2 + 2.0 * t3;
        f[1] = t - 2.0 * t2 + t3;
        f[2] = 3.0 * t2 - 2.0 * t3;
        f[3] = -t2 + t3;
        d1[0] = -6.0 * t + 6.0 * t2;
        d1[1] = 1.0 - 4.0 * t + 3.0 * t2;
        d1[2] = 6.0 * t - 6.0 * t2;
        d1[3] = -2.0 * t + 3.0 * t2;
        d2[0] = -6.0 + 12.0 * t;
        d2[1] = -4.0 + 6.0 * t;
        d2[2] = 6.0 - 12.0 * t;
        d2[3] = -2.0 + 6.0 * t;
    }
};

// Corner c of a square: 0 (0,0), 1 (1,0), 2 (0,1), 3 (1,1).
constexpr int corner_a[4] = {0, 1, 0, 1};
constexpr int corner_b[4] = {0, 0, 1, 1};

SymTensor basis_from(const Hermite &hx_fun, const Hermite &hy_fun, double hx, double hy,
                     int corner, int dof) {
    const int a = corner_a[corner], b = corner_b[corner];
    // x factor: value function for dofs phi, phi_y; slope for phi_x, phi_xy.
    const bool slope_x = dof == 1 || dof == 3;
    const bool slope_y = dof == 2 || dof == 3;
    const int ix = 2 * a + (slope_x ? 1 : 0);
    const int iy = 2 * b + (slope_y ? 1 : 0);
    const double sx = slope_x ? hx : 1.0, sy = slope_y ? hy : 1.0;
    const double X = sx * hx_fun.f[ix], Xd = sx * hx_fun.d1[ix] / hx,
                 Xdd = sx * hx_fun.d2[ix] / (hx * hx);
    const double Y = sy * hy_fun.f[iy], Yd = sy * hy_fun.d1[iy] / hy,
                 Ydd = sy * hy_fun.d2[iy] / (hy * hy);
    return {X * Ydd, Xdd * Y, -Xd * Yd};
}

} // namespace

AiryStress::AiryStress(Grid grid, Eigen::VectorXd coefficients, std::array<double, 2> body_force)
    : grid_(grid), coef_(std::move(coefficients)), force_(body_force) {
    if (coef_.size() != 4 * (grid_.nx + 1) * (grid_.ny + 1))
        throw InvalidInput("Airy stress: four coefficients per grid node required");
}

SymTensor AiryStress::basis_stress(const Grid &grid, int corner, int dof, double xi,
                                   double eta) {
    return basis_from(Hermite(xi), Hermite(eta), grid.hx, grid.hy, corner, dof);
}

SymTensor AiryStress::evaluate_local(Index i, Index j, double xi, double eta) const {
    const Hermite hx_fun(xi), hy_fun(eta);
    const Index nodes[4] = {j * (grid_.nx + 1) + i, j * (grid_.nx + 1) + i + 1,
                            (j + 1) * (grid_.nx + 1) + i, (j + 1) * (grid_.nx + 1) + i + 1};
    SymTensor s;
    for (int c = 0; c < 4; ++c)
        for (int k = 0; k < 4; ++k) {
            const double w = coef_[4 * nodes[c] + k];
            if (w == 0.0)
                continue;
            const SymTensor b = basis_from(hx_fun, hy_fun, grid_.hx, grid_.hy, c, k);
            s.xx += w * b.xx;
            s.yy += w * b.yy;
            s.xy += w * b.xy;
        }
    const double x = grid_.x0 + (static_cast<double>(i) + xi) * grid_.hx;
    const double y = grid_.y0 + (static_cast<double>(j) + eta) * grid_.hy;
    s.xx -= force_[0] * x;
    s.yy -= force_[1] * y;
    return s;
}

SymTensor AiryStress::evaluate(const Point &p) const {
    const double sx = (p[0] - grid_.x0) / grid_.hx, sy = (p[1] - grid_.y0) / grid_.hy;
    const Index i = std::clamp<Index>(static_cast<Index>(std::floor(sx)), 0, grid_.nx - 1);
    const Index j = std::clamp<Index>(static_cast<Index>(std::floor(sy)), 0, grid_.ny - 1);
    return evaluate_local(i, j, sx - static_cast<double>(i), sy - static_cast<double>(j));
}

double compliance_product(double lambda, double mu, const SymTensor &s, const SymTensor &t) {
    const double kappa = lambda / (2.0 * (lambda + mu));
    const double contraction = s.xx * t.xx + s.yy * t.yy + 2.0 * s.xy * t.xy;
    return (contraction - kappa * (s.xx + s.yy) * (t.xx + t.yy)) / (2.0 * mu);
}

} // namespace gcre
