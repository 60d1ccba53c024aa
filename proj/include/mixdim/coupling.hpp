#pragma once

#include "mixdim/dg1d.hpp"
#include "mixdim/geometry.hpp"
#include "mixdim/linalg.hpp"
#include "mixdim/mesh3d.hpp"

#include <utility>
#include <vector>

namespace mixdim {

/// One Gauss point on the centerline with the discrete lateral-average
/// operator restricted to it: avg_row holds (3D dof, (1/n) sum_j phi_dof(x_j)).
struct LinePoint {
    int element;
    double s;
    double weight;
    std::vector<std::pair<int, double>> avg_row;
    std::vector<double> basis; // 1D basis values of `element` at s
};

/// The single discrete averaging operator: every use of the lateral average goes
/// through the same Gauss points and circle quadrature.
class LineQuadrature {
public:
    LineQuadrature(const VesselGeometry& geometry, const FemSpace& fem, const DgSpace& dg, int gauss_points,
                   int n_circ);

    const std::vector<LinePoint>& points() const { return points_; }
    int gauss_points() const { return gauss_points_; }
    int circle_points() const { return n_circ_; }

    /// Sum over points of weight * g(s) * avg_row: the load vector of int_Lambda g v_bar.
    std::vector<double> line_load(const std::function<double(double)>& g, int fem_dofs) const;

private:
    std::vector<LinePoint> points_;
    int gauss_points_, n_circ_;
};

/// Mean of the P1 field over the n_circ circle points at s.
double lateral_average(const VesselGeometry& geometry, const FemSpace& fem, std::span<const double> c, double s,
                       int n_circ);

/// Sparse averaging row at s: (dof, coefficient) sorted by dof.
std::vector<std::pair<int, double>> lateral_average_row(const VesselGeometry& geometry, const FemSpace& fem, double s,
                                                        int n_circ);

struct CouplingBlocks {
    SparseMatrix oo; // n_Omega x n_Omega
    SparseMatrix ol; // n_Omega x n_Lambda
    SparseMatrix lo; // n_Lambda x n_Omega
    SparseMatrix ll; // n_Lambda x n_Lambda
    int gauss_points = 0;
    int circle_points = 0;
};

namespace coupling {

/// Default Gauss points per 1D element: degree + 2.
int gauss_points(int degree);
inline constexpr int default_circle_points = 16;

/// Blocks of the exchange form int_Lambda gamma |dD| (c_bar - c_hat)(v_bar - v_hat).
CouplingBlocks assemble(const VesselGeometry& geometry, const LineQuadrature& quad, int fem_dofs, int dg_dofs);

CouplingBlocks assemble(const VesselGeometry& geometry, const FemSpace& fem, const DgSpace& dg, int n_circ);

} // namespace coupling
} // namespace mixdim
