#include "mixdim/mesh3d.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace mixdim;

TEST(TetMesh, Counts)
{
    const TetMesh unit({0, 0, 0}, {1, 1, 1}, 2);
    EXPECT_EQ(unit.vertex_count(), 27);
    EXPECT_EQ(unit.tet_count(), 48);
    const TetMesh box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, 4);
    EXPECT_EQ(box.vertex_count(), 125);
    EXPECT_EQ(box.tet_count(), 384);
    EXPECT_DOUBLE_EQ(box.cell_size(), 0.25);
    EXPECT_NEAR(box.diameter(), std::sqrt(3.0) / 4, 1e-15);
    EXPECT_THROW(TetMesh({0, 0, 0}, {1, 1, 1}, 1), ConfigError);
    EXPECT_THROW(TetMesh({0, 0, 0}, {1, -1, 1}, 3), ConfigError);
}

TEST(TetMesh, PositiveVolumesTileTheBox)
{
    const TetMesh m({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, 8);
    double total = 0.0;
    for (int k = 0; k < m.tet_count(); ++k) {
        EXPECT_GT(m.volume(k), 0.0);
        total += m.volume(k);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(TetMesh, ConformingFaces)
{
    const TetMesh m({0, 0, 0}, {1, 1, 1}, 3);
    std::map<std::array<int, 3>, int> faces;
    for (int k = 0; k < m.tet_count(); ++k) {
        const auto t = m.tet(k);
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> f;
            int j = 0;
            for (int i = 0; i < 4; ++i)
                if (i != skip) f[j++] = t[i];
            std::sort(f.begin(), f.end());
            ++faces[f];
        }
    }
    for (const auto& [f, count] : faces) {
        ASSERT_LE(count, 2);
        if (count == 1) {
            // a boundary face: all three vertices on a common box face
            bool common = false;
            for (int d = 0; d < 3; ++d)
                for (double side : {0.0, 1.0}) {
                    bool all = true;
                    for (int v : f) all = all && m.vertices()[v][d] == side;
                    common = common || all;
                }
            EXPECT_TRUE(common);
        }
    }
}

TEST(TetMesh, KuhnCellsShareTheMainDiagonal)
{
    const TetMesh m({0, 0, 0}, {1, 1, 1}, 2);
    // the first six tets belong to cell (0,0,0) with diagonal vertices 0 and the far corner
    const int far_corner = 1 + 3 * (1 + 3 * 1);
    for (int k = 0; k < 6; ++k) {
        const auto t = m.tet(k);
        EXPECT_NE(std::find(t.begin(), t.end(), 0), t.end());
        EXPECT_NE(std::find(t.begin(), t.end(), far_corner), t.end());
    }
}

TEST(TetMesh, ShapeFunctions)
{
    const TetMesh m({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, 3);
    for (int k = 0; k < m.tet_count(); ++k) {
        const auto& g = m.shape_gradients(k);
        const Vec3 sum = g[0] + g[1] + g[2] + g[3];
        EXPECT_LT(norm(sum), 1e-12);
        const auto t = m.tet(k);
        for (int j = 0; j < 4; ++j) {
            const auto b = m.barycentric(k, m.vertices()[t[j]]);
            for (int i = 0; i < 4; ++i) EXPECT_NEAR(b[i], i == j ? 1.0 : 0.0, 1e-13);
        }
        // gradient of an interpolated affine function equals its gradient
        const Vec3 grad{0.3, -1.2, 2.0};
        Vec3 gi{};
        for (int i = 0; i < 4; ++i) gi += dot(grad, m.vertices()[t[i]]) * g[i];
        EXPECT_LT(norm(gi - grad), 1e-12);
    }
}

TEST(TetMesh, LocateVerticesCentroidsAndRandomPoints)
{
    const TetMesh m({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, 5);
    const auto c0 = m.point(0, {0.25, 0.25, 0.25, 0.25});
    const auto loc0 = m.locate(c0);
    EXPECT_EQ(loc0.tet, 0);
    for (double b : loc0.bary) EXPECT_NEAR(b, 0.25, 1e-13);

    const auto lv = m.locate(m.vertices()[37]);
    EXPECT_NEAR(*std::max_element(lv.bary.begin(), lv.bary.end()), 1.0, 1e-13);

    const FemSpace fem(m);
    const auto affine = [](const Vec3& x) { return 0.7 - 2.0 * x.x + 0.4 * x.y + 3.0 * x.z; };
    const auto u = fem.interpolate(affine);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (int trial = 0; trial < 100000; ++trial) {
        const Vec3 x{d(rng), d(rng), d(rng)};
        const auto loc = m.locate(x);
        double sum = 0.0;
        for (double b : loc.bary) {
            EXPECT_GE(b, -1e-12);
            EXPECT_LE(b, 1.0 + 1e-12);
            sum += b;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_LT(norm(m.point(loc.tet, loc.bary) - x), 1e-12);
        EXPECT_NEAR(fem.evaluate(u, x), affine(x), 1e-12);
    }
    EXPECT_NO_THROW(m.locate({0.5, 0.5, 0.5}));
    EXPECT_THROW(m.locate({0.5 + 1e-9, 0.0, 0.0}), GeometryError);
}

TEST(FemSpace, DirichletMaskIsTheBoundary)
{
    const TetMesh m({0, 0, 0}, {1, 1, 1}, 4);
    const FemSpace fem(m);
    EXPECT_EQ(fem.dof_count(), 125);
    EXPECT_EQ(static_cast<int>(fem.dirichlet_dofs().size()), 125 - 27);
    for (int v = 0; v < fem.dof_count(); ++v) {
        const auto& x = m.vertices()[v];
        const bool on = std::min({x.x, x.y, x.z, 1 - x.x, 1 - x.y, 1 - x.z}) == 0.0;
        EXPECT_EQ(fem.is_dirichlet(v), on);
    }
}
