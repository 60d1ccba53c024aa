#include "test_util.hpp"

#include "mixdim/fem3d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mixdim;

namespace {

const Vec3 lo{-0.5, -0.5, -0.5}, hi{0.5, 0.5, 0.5};

ScalarField3 field(std::function<double(const Vec3&)> f)
{
    return {[f](const Vec3& x, double) { return f(x); }, false};
}

} // namespace

TEST(Fem3dMass, SumSymmetryDefiniteness)
{
    const TetMesh m(lo, hi, 4);
    const FemSpace fem(m);
    const auto M = fem3d::assemble_mass(fem);
    const std::vector<double> one(fem.dof_count(), 1.0);
    EXPECT_NEAR(M.bilinear(one, one), 1.0, 1e-12);
    const auto D = M.to_dense();
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) EXPECT_NEAR(D[i][j], D[j][i], 1e-14);
    std::mt19937 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = test_util::random_vector(fem.dof_count(), rng);
        EXPECT_GT(M.bilinear(x, x), 0.0);
    }
}

TEST(Fem3dStiffness, KernelAffineExactnessLinearity)
{
    const TetMesh m(lo, hi, 4);
    const FemSpace fem(m);
    const auto A = fem3d::assemble_stiffness(fem, ScalarField3::constant(1.0));
    for (double v : A * std::vector<double>(fem.dof_count(), 1.0)) EXPECT_NEAR(v, 0.0, 1e-12);
    const auto gx = fem.interpolate([](const Vec3& x) { return x.x; });
    EXPECT_NEAR(A.bilinear(gx, gx), 1.0, 1e-12);

    const auto A2 = fem3d::assemble_stiffness(fem, ScalarField3::constant(2.0));
    for (std::size_t k = 0; k < A.values().size(); ++k) EXPECT_NEAR(A2.values()[k], 2.0 * A.values()[k], 1e-14);

    EXPECT_THROW(fem3d::assemble_stiffness(fem, field([](const Vec3& x) { return x.z; })), CoefficientError);
}

TEST(Fem3dConvection, AffineIdentities)
{
    const TetMesh m(lo, hi, 4);
    const FemSpace fem(m);
    const auto zero = fem3d::assemble_convection(fem, VectorField3::constant({0, 0, 0}));
    for (double v : zero * std::vector<double>(fem.dof_count(), 1.0)) EXPECT_EQ(v, 0.0);

    const auto B = fem3d::assemble_convection(fem, VectorField3::constant({0, 0, 1}));
    const auto z = fem.interpolate([](const Vec3& x) { return x.z; });
    const std::vector<double> one(fem.dof_count(), 1.0);
    EXPECT_NEAR(B.bilinear(z, z), 0.0, 1e-13);
    EXPECT_NEAR(B.bilinear(z, one), -1.0, 1e-12);
}

TEST(Fem3dLoad, ConstantZeroDeterministic)
{
    const TetMesh m(lo, hi, 3);
    const FemSpace fem(m);
    double sum = 0.0;
    for (double v : fem3d::assemble_load(fem, ScalarField3::constant(1.0), 0.0)) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (double v : fem3d::assemble_load(fem, ScalarField3::zero(), 0.0)) EXPECT_EQ(v, 0.0);
    const auto f = field([](const Vec3& x) { return std::log(0.01 + x.x * x.x + x.y * x.y); });
    EXPECT_EQ(fem3d::assemble_load(fem, f, 1.0), fem3d::assemble_load(fem, f, 1.0));
}

TEST(Fem3dDirichlet, RowReplacement)
{
    const TetMesh m(lo, hi, 3);
    const FemSpace fem(m);
    auto S = fem3d::assemble_stiffness(fem, ScalarField3::constant(1.0));
    std::vector<double> rhs(fem.dof_count(), 7.0);
    const auto g = field([](const Vec3& x) { return x.x + 2 * x.y; });
    fem3d::apply_dirichlet(fem, S, rhs, g, 0.0);
    for (int i = 0; i < fem.dof_count(); ++i) {
        int nonzeros = 0;
        for (int k = S.row_offsets()[i]; k < S.row_offsets()[i + 1]; ++k) nonzeros += S.values()[k] != 0.0;
        if (fem.is_dirichlet(i)) {
            EXPECT_EQ(nonzeros, 1);
            EXPECT_EQ(S.coeff(i, i), 1.0);
            EXPECT_EQ(rhs[i], g(m.vertices()[i], 0.0));
        } else {
            EXPECT_EQ(rhs[i], 7.0);
        }
    }
    const Factorization F(S);
    const auto u = F.solve(rhs);
    for (int i : fem.dirichlet_dofs()) EXPECT_EQ(u[i], g(m.vertices()[i], 0.0));
}

TEST(Fem3dPoisson, SecondOrderL2Convergence)
{
    // -lap g = f with g = x^2 + y z on the box, exact Dirichlet data
    const auto g = [](const Vec3& x) { return x.x * x.x + x.y * x.z - 0.3 * x.z; };
    std::vector<double> h, err;
    for (int n : {4, 8, 16}) {
        const TetMesh m(lo, hi, n);
        const FemSpace fem(m);
        auto A = fem3d::assemble_stiffness(fem, ScalarField3::constant(1.0));
        auto rhs = fem3d::assemble_load(fem, ScalarField3::constant(-2.0), 0.0);
        fem3d::apply_dirichlet(fem, A, rhs, field(g), 0.0);
        const auto u = Factorization(A).solve(rhs);
        // L2 error with the order-4 rule
        double e2 = 0.0;
        for (int k = 0; k < m.tet_count(); ++k)
            for (const auto& q : tet_quadrature(4)) {
                const Vec3 x = m.point(k, q.bary);
                double uh = 0.0;
                for (int i = 0; i < 4; ++i) uh += q.bary[i] * u[m.tet(k)[i]];
                e2 += q.weight * 6.0 * m.volume(k) * std::pow(uh - g(x), 2);
            }
        h.push_back(1.0 / n);
        err.push_back(std::sqrt(e2));
    }
    const double slope = std::log(err.front() / err.back()) / std::log(h.front() / h.back());
    EXPECT_GE(slope, 1.8);
}

TEST(Fem3dCoefficients, VelocityBoundReport)
{
    const TetMesh m(lo, hi, 3);
    const FemSpace fem(m);
    const auto ok = fem3d::check_coefficients(fem, ScalarField3::constant(1.0), VectorField3::constant({0, 0, 1}));
    EXPECT_TRUE(ok.divergence_free);
    EXPECT_TRUE(ok.warning.empty());
    EXPECT_NEAR(ok.kappa_min, 1.0, 1e-15);

    VectorField3 swirl{[](const Vec3& x) { return Vec3{50 * x.x, 0, 0}; }, false, false};
    const auto bad = fem3d::check_coefficients(fem, ScalarField3::constant(1.0), swirl);
    EXPECT_FALSE(bad.velocity_bound_ok);
    EXPECT_FALSE(bad.warning.empty());
}
