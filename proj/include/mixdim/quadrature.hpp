#pragma once

#include <array>
#include <vector>

namespace mixdim {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (exact for degree 2n-1), nodes by Newton iteration.
GaussRule gauss_legendre(int n);

/// Legendre polynomial P_m and its derivative at xi in [-1, 1].
double legendre(int m, double xi);
double legendre_derivative(int m, double xi);

struct TetQuadPoint {
    std::array<double, 4> bary;
    double weight; // reference tet has volume 1/6
};

/// Rules on the reference tetrahedron, exact for total degree `order`.
/// Supported orders: 1 (centroid), 2 (4 points), 4 (14 points, degree 5).
const std::vector<TetQuadPoint>& tet_quadrature(int order);

} // namespace mixdim
