#include "dense_dg_oracle.hpp"
#include "test_util.hpp"

#include "mixdim/dg1d.hpp"
#include "mixdim/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mixdim;

namespace {

DgSpace make_space(const oracle::Setup& c)
{
    return DgSpace(Partition1D::uniform(c.length, c.elements), c.degree);
}

LineFunction area_of(const oracle::Setup& c)
{
    return [c](double s) { return c.area(s); };
}

void expect_matches(const SparseMatrix& A, const oracle::Dense& D, double tol)
{
    ASSERT_EQ(A.rows(), static_cast<int>(D.size()));
    const auto dense = A.to_dense();
    for (std::size_t i = 0; i < D.size(); ++i)
        for (std::size_t j = 0; j < D.size(); ++j) EXPECT_NEAR(dense[i][j], D[i][j], tol) << "entry " << i << "," << j;
}

} // namespace

TEST(Partition1D, UniformAndLookup)
{
    const auto p = Partition1D::uniform(2.0, 4);
    EXPECT_EQ(p.element_count(), 4);
    EXPECT_DOUBLE_EQ(p.mesh_size(), 0.5);
    EXPECT_EQ(p.element_of(0.0), 0);
    EXPECT_EQ(p.element_of(0.5), 1); // interior node belongs to the right element
    EXPECT_EQ(p.element_of(2.0), 3);
}

TEST(DgSpace, TracesJumpsAverages)
{
    DgSpace dg(Partition1D::uniform(1.0, 2), 1);
    std::vector<double> indicator(dg.dof_count(), 0.0);
    indicator[dg.dof(0, 0)] = 1.0;
    EXPECT_DOUBLE_EQ(dg.jump(indicator, 1), 1.0);
    EXPECT_DOUBLE_EQ(dg.average(indicator, 1), 0.5);
    EXPECT_THROW(dg.jump(indicator, 0), DomainError);
    EXPECT_THROW(dg.jump(indicator, 2), DomainError);

    const auto s = dg1d::l2_project(dg, [](double x) { return x; });
    EXPECT_NEAR(dg.jump(s, 1), 0.0, 1e-14);
    EXPECT_NEAR(dg.trace(s, 1, DgSpace::Side::minus), 0.5, 1e-14);
}

TEST(DgSpace, LegendreBasisIsOrthogonal)
{
    DgSpace dg(Partition1D::uniform(1.0, 3), 3);
    const auto M = dg1d::assemble_mass_weighted(dg, [](double) { return 1.0; }).to_dense();
    for (int i = 0; i < dg.dof_count(); ++i)
        for (int j = 0; j < dg.dof_count(); ++j)
            if (i != j) EXPECT_NEAR(M[i][j], 0.0, 1e-12);
}

TEST(DgMass, UnitElementHandValues)
{
    DgSpace dg(Partition1D::uniform(1.0, 1), 1);
    const auto M = dg1d::assemble_mass_weighted(dg, [](double) { return 1.0; }).to_dense();
    EXPECT_NEAR(M[0][0], 1.0, 1e-14);
    EXPECT_NEAR(M[1][1], 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(M[0][1], 0.0, 1e-14);
}

TEST(DgMass, ConstantPairingIsAreaTimesLength)
{
    const double R = 0.05, L = 0.8 * std::sqrt(3.0);
    DgSpace dg(Partition1D::uniform(L, 7), 2);
    const auto M = dg1d::assemble_mass_weighted(dg, [R](double) { return pi * R * R; });
    const auto one = dg1d::l2_project(dg, [](double) { return 1.0; });
    EXPECT_NEAR(M.bilinear(one, one), pi * R * R * L, 1e-14);
}

class DenseOracle : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(DenseOracle, MassStiffnessAdvectionInflow)
{
    const auto [degree, epsilon] = GetParam();
    for (const double slope : {0.0, 0.7}) {
        oracle::Setup c;
        c.degree = degree;
        c.epsilon = epsilon;
        c.area1 = slope;
        c.kappa = 1.3;
        c.velocity = 0.9;
        const auto dg = make_space(c);
        const auto area = area_of(c);
        const double kappa = c.kappa;
        expect_matches(dg1d::assemble_mass_weighted(dg, area), oracle::mass(c), 1e-12);
        expect_matches(dg1d::assemble_a_lambda(dg, [kappa](double) { return kappa; }, area,
                                               DgParams{c.epsilon, c.sigma, 50.0}),
                       oracle::a_lambda(c), 1e-12);
        expect_matches(dg1d::assemble_b_lambda(dg, c.velocity, area), oracle::b_lambda(c), 1e-12);
        const auto f = dg1d::assemble_inflow_rhs(dg, c.area(0.0), c.velocity, 2.5);
        const auto g = oracle::inflow(c, 2.5);
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], g[i], 1e-12);
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, DenseOracle,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(-1, 0, 1)));

TEST(DgALambda, ConstantsInKernelAndSymmetry)
{
    DgSpace dg(Partition1D::uniform(1.0, 5), 2);
    const auto area = [](double s) { return 1.0 + s; };
    const auto one = dg1d::l2_project(dg, [](double) { return 1.0; });
    for (int eps : {-1, 0, 1}) {
        const auto A = dg1d::assemble_a_lambda(dg, [](double) { return 1.0; }, area, DgParams{eps, 50.0, 50.0});
        for (double v : A * one) EXPECT_NEAR(v, 0.0, 1e-12);
        const auto D = A.to_dense();
        double asym = 0.0;
        for (int i = 0; i < A.rows(); ++i)
            for (int j = 0; j < A.cols(); ++j) asym = std::max(asym, std::abs(D[i][j] - D[j][i]));
        if (eps == 1)
            EXPECT_LT(asym, 1e-13);
        else
            EXPECT_GT(asym, 1e-6);
    }
}

TEST(DgALambda, AntisymmetricVariantCancelsCrossTerms)
{
    DgSpace dg(Partition1D::uniform(1.0, 6), 2);
    const auto area = [](double) { return 1.0; };
    const double sigma = 3.0;
    const auto A = dg1d::assemble_a_lambda(dg, area, area, DgParams{-1, sigma, 50.0});
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(dg.dof_count());
        for (auto& x : v) x = u(rng);
        const double seminorm = dg1d::dg_seminorm(dg, v, sigma);
        EXPECT_NEAR(A.bilinear(v, v), seminorm * seminorm, 1e-10 * seminorm * seminorm);
    }
}

TEST(DgALambda, RejectsSmallPenalty)
{
    DgSpace dg(Partition1D::uniform(1.0, 2), 1);
    const auto one = [](double) { return 1.0; };
    EXPECT_THROW(dg1d::assemble_a_lambda(dg, one, one, DgParams{1, 10.0, 50.0}), ConfigError);
    EXPECT_THROW(dg1d::assemble_a_lambda(dg, one, one, DgParams{2, 50.0, 50.0}), ConfigError);
    EXPECT_NO_THROW(dg1d::assemble_a_lambda(dg, one, one, DgParams{-1, 1.0, 50.0}));
}

TEST(DgBLambda, ConstantPairingIsOutflow)
{
    const double L = 1.3;
    DgSpace dg(Partition1D::uniform(L, 4), 2);
    const auto area = [](double s) { return 0.5 + s * s; };
    const auto B = dg1d::assemble_b_lambda(dg, 2.0, area);
    const auto one = dg1d::l2_project(dg, [](double) { return 1.0; });
    EXPECT_NEAR(B.bilinear(one, one), area(L) * 2.0, 1e-12);
    EXPECT_THROW(dg1d::assemble_b_lambda(dg, 0.0, area), ConfigError);
}

TEST(DgInflow, PairingWithConstant)
{
    const double R = 0.05;
    DgSpace dg(Partition1D::uniform(1.0, 3), 2);
    const auto f = dg1d::assemble_inflow_rhs(dg, pi * R * R, 1.0, 5.0);
    const auto one = dg1d::l2_project(dg, [](double) { return 1.0; });
    double pairing = 0.0;
    for (int i = 0; i < dg.dof_count(); ++i) pairing += f[i] * one[i];
    EXPECT_NEAR(pairing, pi * R * R * 5.0, 1e-15);
    for (int i = dg.local_size(); i < dg.dof_count(); ++i) EXPECT_EQ(f[i], 0.0);
    for (double v : dg1d::assemble_inflow_rhs(dg, 1.0, 1.0, 0.0)) EXPECT_EQ(v, 0.0);
}

TEST(DgSeminorm, HandValues)
{
    DgSpace dg(Partition1D::uniform(1.0, 2), 1);
    std::vector<double> indicator(dg.dof_count(), 0.0);
    indicator[dg.dof(0, 0)] = 1.0;
    EXPECT_NEAR(std::pow(dg1d::dg_seminorm(dg, indicator, 50.0), 2), 100.0, 1e-12);
    for (int n : {1, 3, 8}) {
        DgSpace d(Partition1D::uniform(1.0, n), 1);
        EXPECT_NEAR(dg1d::dg_seminorm(d, dg1d::l2_project(d, [](double s) { return s; }), 50.0), 1.0, 1e-12);
        EXPECT_NEAR(dg1d::dg_seminorm(d, dg1d::l2_project(d, [](double) { return 4.0; }), 50.0), 0.0, 1e-12);
    }
}

TEST(DgProjection, ReproducesSpaceAndConvergesAtOrderKPlusOne)
{
    for (int k : {1, 2}) {
        DgSpace dg(Partition1D::uniform(1.0, 3), k);
        const auto poly = [k](double s) { return k == 1 ? 2.0 - s : 1.0 + s - 3.0 * s * s; };
        const auto p = dg1d::l2_project(dg, poly);
        for (double s : {0.0, 0.1, 0.5, 0.77, 1.0}) EXPECT_NEAR(dg.evaluate(p, s), poly(s), 1e-12);

        std::vector<double> errors;
        for (int n : {4, 8, 16}) {
            DgSpace d(Partition1D::uniform(1.0, n), k);
            const auto f = [](double s) { return std::sin(pi * s); };
            errors.push_back(test_util::dg_l2_error(d, dg1d::l2_project(d, f), f));
        }
        for (std::size_t i = 1; i < errors.size(); ++i)
            EXPECT_NEAR(std::log2(errors[i - 1] / errors[i]), k + 1.0, 0.15);
    }
}

// Inequalities bounding the 1D forms from below, over both experiment radius profiles.
class DgStability : public ::testing::TestWithParam<std::tuple<int, int, int>> {};

TEST_P(DgStability, CoercivityAndPositivity)
{
    const auto [n, k, profile] = GetParam();
    const double L = 0.8 * std::sqrt(3.0);
    const VesselGeometry geom({-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4},
                              profile == 0 ? RadiusProfile::constant(0.05)
                                           : RadiusProfile::tanh_ramp(0.05, 0.08, 8.0),
                              PermeabilityProfile::constant(0.1));
    const auto area = [&geom](double s) { return geom.section_area(s); };
    DgSpace dg(Partition1D::uniform(L, n), k);
    const double scale = 0.5 * std::min(geom.d0() * 1.0, 1.0);

    std::mt19937 rng(1000 * n + 10 * k + profile);
    std::normal_distribution<double> g;
    const std::vector<DgParams> variants = {{1, 50.0, 50.0}, {0, 50.0, 50.0}, {-1, 1.0, 50.0}};
    for (const auto& params : variants) {
        const auto A = dg1d::assemble_a_lambda(dg, [](double) { return 1.0; }, area, params);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> v(dg.dof_count());
            for (auto& x : v) x = g(rng);
            const double semi = dg1d::dg_seminorm(dg, v, params.sigma);
            EXPECT_GE(A.bilinear(v, v), scale * semi * semi - 1e-10);
        }
    }

    const auto B = dg1d::assemble_b_lambda(dg, 1.0, area);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> v(dg.dof_count());
        for (auto& x : v) x = g(rng);
        double bound = 0.5 * area(0.0) * std::pow(dg.trace(v, 0, DgSpace::Side::plus), 2) +
                       0.5 * area(L) * std::pow(dg.trace(v, n, DgSpace::Side::minus), 2);
        for (int i = 1; i < n; ++i) bound += 0.5 * area(dg.partition().node(i)) * std::pow(dg.jump(v, i), 2);
        EXPECT_GE(B.bilinear(v, v), bound - 1e-10);
    }
}

INSTANTIATE_TEST_SUITE_P(Sweep, DgStability,
                         ::testing::Combine(::testing::Values(2, 4, 8, 16), ::testing::Values(1, 2),
                                            ::testing::Values(0, 1)));
