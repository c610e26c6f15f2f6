#pragma once

#include <array>
#include <vector>

namespace gcre {

struct QuadraturePoint {
    std::array<double, 2> ref; ///< reference coordinates
    double weight;             ///< weight on the reference cell
};

/// n-point Gauss-Legendre rule on [0, 1] (exact for degree 2n-1).
std::vector<QuadraturePoint> gauss_interval(int n);

/// Collapsed tensor Gauss rule on the reference triangle (0,0),(1,0),(0,1).
///
/// Exact for polynomials of total degree 2n-2; weights sum to 1/2.
std::vector<QuadraturePoint> gauss_triangle(int n);

/// n x n tensor Gauss rule on [0, 1]^2.
std::vector<QuadraturePoint> gauss_square(int n);

} // namespace gcre
