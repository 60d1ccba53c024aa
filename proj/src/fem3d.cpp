#include "mixdim/fem3d.hpp"

#include "mixdim/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace mixdim::fem3d {

namespace {

// Physical quadrature points of tet k together with physical weights.
template <class F>
void for_each_qp(const TetMesh& mesh, int k, int order, F&& f)
{
    const double scale = 6.0 * mesh.volume(k);
    for (const auto& q : tet_quadrature(order)) f(mesh.point(k, q.bary), q.bary, q.weight * scale);
}

} // namespace

SparseMatrix assemble_mass(const FemSpace& space)
{
    const auto& mesh = space.mesh();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.tet_count()) * 16);
    for (int k = 0; k < mesh.tet_count(); ++k) {
        std::array<double, 16> local{};
        for_each_qp(mesh, k, assembly_order, [&](const Vec3&, const std::array<double, 4>& phi, double w) {
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) local[4 * i + j] += w * phi[i] * phi[j];
        });
        const auto& tv = mesh.tet(k);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t.push_back({tv[i], tv[j], local[4 * i + j]});
    }
    return SparseMatrix::from_triplets(space.dof_count(), space.dof_count(), std::move(t));
}

SparseMatrix assemble_stiffness(const FemSpace& space, const ScalarField3& kappa)
{
    const auto& mesh = space.mesh();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.tet_count()) * 16);
    for (int k = 0; k < mesh.tet_count(); ++k) {
        double kappa_int = 0.0;
        for_each_qp(mesh, k, assembly_order, [&](const Vec3& x, const std::array<double, 4>&, double w) {
            const double kv = kappa(x, 0.0);
            if (!(kv > 0.0)) {
                std::ostringstream msg;
                msg << "diffusion coefficient " << kv << " is not positive at (" << x.x << ", " << x.y << ", " << x.z
                    << ")";
                throw CoefficientError(msg.str());
            }
            kappa_int += w * kv;
        });
        const auto& g = mesh.shape_gradients(k);
        const auto& tv = mesh.tet(k);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t.push_back({tv[i], tv[j], kappa_int * dot(g[i], g[j])});
    }
    return SparseMatrix::from_triplets(space.dof_count(), space.dof_count(), std::move(t));
}

SparseMatrix assemble_convection(const FemSpace& space, const VectorField3& velocity)
{
    const int n = space.dof_count();
    if (velocity.is_zero) return SparseMatrix(n, n);
    const auto& mesh = space.mesh();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.tet_count()) * 16);
    for (int k = 0; k < mesh.tet_count(); ++k) {
        const auto& g = mesh.shape_gradients(k);
        std::array<double, 16> local{};
        for_each_qp(mesh, k, assembly_order, [&](const Vec3& x, const std::array<double, 4>& phi, double w) {
            const Vec3 u = velocity(x);
            for (int i = 0; i < 4; ++i) {
                const double ug = dot(u, g[i]);
                for (int j = 0; j < 4; ++j) local[4 * i + j] -= w * ug * phi[j];
            }
        });
        const auto& tv = mesh.tet(k);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t.push_back({tv[i], tv[j], local[4 * i + j]});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

std::vector<double> assemble_load(const FemSpace& space, const ScalarField3& f, double t)
{
    std::vector<double> F(space.dof_count(), 0.0);
    if (f.is_zero) return F;
    const auto& mesh = space.mesh();
    for (int k = 0; k < mesh.tet_count(); ++k) {
        const auto& tv = mesh.tet(k);
        for_each_qp(mesh, k, load_order, [&](const Vec3& x, const std::array<double, 4>& phi, double w) {
            const double fw = w * f(x, t);
            for (int i = 0; i < 4; ++i) F[tv[i]] += fw * phi[i];
        });
    }
    return F;
}

void apply_dirichlet_rows(const FemSpace& space, SparseMatrix& system)
{
    for (int i : space.dirichlet_dofs()) system.set_identity_row(i);
}

void apply_dirichlet_rhs(const FemSpace& space, std::vector<double>& rhs, const ScalarField3& g, double t)
{
    const auto& verts = space.mesh().vertices();
    for (int i : space.dirichlet_dofs()) rhs[i] = g(verts[i], t);
}

void apply_dirichlet(const FemSpace& space, SparseMatrix& system, std::vector<double>& rhs, const ScalarField3& g,
                     double t)
{
    apply_dirichlet_rows(space, system);
    apply_dirichlet_rhs(space, rhs, g, t);
}

CoefficientReport check_coefficients(const FemSpace& space, const ScalarField3& kappa, const VectorField3& velocity)
{
    const auto& mesh = space.mesh();
    CoefficientReport rep;
    rep.kappa_min = std::numeric_limits<double>::max();
    rep.kappa_max = 0.0;
    rep.divergence_free = velocity.divergence_free;
    for (int k = 0; k < mesh.tet_count(); ++k)
        for_each_qp(mesh, k, assembly_order, [&](const Vec3& x, const std::array<double, 4>&, double) {
            const double kv = kappa(x, 0.0);
            if (!(kv > 0.0)) throw CoefficientError("diffusion coefficient must be positive");
            rep.kappa_min = std::min(rep.kappa_min, kv);
            rep.kappa_max = std::max(rep.kappa_max, kv);
            if (!velocity.is_zero) rep.velocity_max = std::max(rep.velocity_max, norm(velocity(x)));
        });
    // Poincare constant of a box: 1 / (pi sqrt(sum 1/a_d^2))
    const Vec3 ext = mesh.upper() - mesh.lower();
    rep.poincare_estimate = 1.0 / (pi * std::sqrt(1.0 / (ext.x * ext.x) + 1.0 / (ext.y * ext.y) + 1.0 / (ext.z * ext.z)));
    const double bound = rep.kappa_min / (2.0 * rep.poincare_estimate);
    rep.velocity_bound_ok = rep.velocity_max <= bound;
    if (!rep.divergence_free && !rep.velocity_bound_ok) {
        std::ostringstream msg;
        msg << "velocity is not flagged divergence-free and max |U| = " << rep.velocity_max
            << " exceeds k0/(2 C0) ~ " << bound << "; stability estimate does not apply";
        rep.warning = msg.str();
    }
    return rep;
}

} // namespace mixdim::fem3d
