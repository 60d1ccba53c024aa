#include "mixdim/coupling.hpp"

#include "mixdim/quadrature.hpp"

#include <algorithm>
#include <map>

namespace mixdim {

std::vector<std::pair<int, double>> lateral_average_row(const VesselGeometry& geometry, const FemSpace& fem, double s,
                                                        int n_circ)
{
    std::map<int, double> row;
    const auto& mesh = fem.mesh();
    for (const auto& p : geometry.circle_points(s, n_circ)) {
        const auto loc = mesh.locate(p.x);
        const auto& tv = mesh.tet(loc.tet);
        for (int i = 0; i < 4; ++i) row[tv[i]] += loc.bary[i] / n_circ;
    }
    return {row.begin(), row.end()};
}

double lateral_average(const VesselGeometry& geometry, const FemSpace& fem, std::span<const double> c, double s,
                       int n_circ)
{
    double v = 0.0;
    for (const auto& [dof, a] : lateral_average_row(geometry, fem, s, n_circ)) v += a * c[dof];
    return v;
}

LineQuadrature::LineQuadrature(const VesselGeometry& geometry, const FemSpace& fem, const DgSpace& dg,
                               int gauss_points, int n_circ)
    : gauss_points_(gauss_points), n_circ_(n_circ)
{
    const auto rule = gauss_legendre(gauss_points);
    const auto& part = dg.partition();
    for (int e = 0; e < dg.element_count(); ++e) {
        const double a = part.node(e), h = part.element_size(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            LinePoint lp;
            lp.element = e;
            lp.s = a + 0.5 * h * (rule.points[q] + 1.0);
            lp.weight = 0.5 * h * rule.weights[q];
            lp.avg_row = lateral_average_row(geometry, fem, lp.s, n_circ);
            for (int m = 0; m <= dg.degree(); ++m) lp.basis.push_back(dg.basis(e, m, lp.s));
            points_.push_back(std::move(lp));
        }
    }
}

std::vector<double> LineQuadrature::line_load(const std::function<double(double)>& g, int fem_dofs) const
{
    std::vector<double> F(fem_dofs, 0.0);
    for (const auto& p : points_) {
        const double gw = p.weight * g(p.s);
        for (const auto& [dof, a] : p.avg_row) F[dof] += gw * a;
    }
    return F;
}

namespace coupling {

int gauss_points(int degree) { return degree + 2; }

CouplingBlocks assemble(const VesselGeometry& geometry, const LineQuadrature& quad, int fem_dofs, int dg_dofs)
{
    std::vector<Triplet> oo, ol, lo, ll;
    for (const auto& p : quad.points()) {
        const double factor = geometry.permeability(p.s) * geometry.section_circumference(p.s) * p.weight;
        if (factor == 0.0) continue;
        const int k1 = static_cast<int>(p.basis.size());
        const int first = p.element * k1;
        for (const auto& [i, ai] : p.avg_row) {
            for (const auto& [j, aj] : p.avg_row) oo.push_back({i, j, factor * ai * aj});
            for (int m = 0; m < k1; ++m) {
                ol.push_back({i, first + m, factor * ai * p.basis[m]});
                lo.push_back({first + m, i, factor * p.basis[m] * ai});
            }
        }
        for (int m = 0; m < k1; ++m)
            for (int l = 0; l < k1; ++l) ll.push_back({first + m, first + l, factor * p.basis[m] * p.basis[l]});
    }
    CouplingBlocks b;
    b.oo = SparseMatrix::from_triplets(fem_dofs, fem_dofs, std::move(oo));
    b.ol = SparseMatrix::from_triplets(fem_dofs, dg_dofs, std::move(ol));
    b.lo = SparseMatrix::from_triplets(dg_dofs, fem_dofs, std::move(lo));
    b.ll = SparseMatrix::from_triplets(dg_dofs, dg_dofs, std::move(ll));
    b.gauss_points = quad.gauss_points();
    b.circle_points = quad.circle_points();
    return b;
}

CouplingBlocks assemble(const VesselGeometry& geometry, const FemSpace& fem, const DgSpace& dg, int n_circ)
{
    const LineQuadrature quad(geometry, fem, dg, gauss_points(dg.degree()), n_circ);
    return assemble(geometry, quad, fem.dof_count(), dg.dof_count());
}

} // namespace coupling
} // namespace mixdim
