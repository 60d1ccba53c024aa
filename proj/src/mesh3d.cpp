#include "mixdim/mesh3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mixdim {

namespace {

// Cube corner offsets along each path of the Kuhn split: vertex 0 -> +e_a -> +e_b -> +e_c.
constexpr std::array<std::array<int, 3>, 6> axis_orders = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

} // namespace

TetMesh::TetMesh(Vec3 lo, Vec3 hi, int n) : lo_(lo), hi_(hi), n_(n)
{
    if (n < 2) throw ConfigError("box mesh needs at least 2 cells per axis");
    for (int d = 0; d < 3; ++d)
        if (!(lo[d] < hi[d])) throw ConfigError("box bounds must satisfy lo < hi");

    const int np = n + 1;
    vertices_.resize(static_cast<std::size_t>(np) * np * np);
    boundary_.resize(vertices_.size());
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                const int v = vertex_id(i, j, k);
                // exact endpoints so boundary vertices sit on the box faces
                const auto coord = [n](double a, double b, int idx) {
                    return idx == n ? b : a + (b - a) * idx / n;
                };
                vertices_[v] = {coord(lo.x, hi.x, i), coord(lo.y, hi.y, j), coord(lo.z, hi.z, k)};
                boundary_[v] = (i == 0 || j == 0 || k == 0 || i == n || j == n || k == n);
            }

    tets_.reserve(static_cast<std::size_t>(6) * n * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (const auto& order : axis_orders) {
                    std::array<int, 3> c{i, j, k};
                    std::array<int, 4> t{};
                    t[0] = vertex_id(c[0], c[1], c[2]);
                    for (int step = 0; step < 3; ++step) {
                        ++c[order[step]];
                        t[step + 1] = vertex_id(c[0], c[1], c[2]);
                    }
                    tets_.push_back(t);
                }

    volumes_.resize(tets_.size());
    grads_.resize(tets_.size());
    for (std::size_t t = 0; t < tets_.size(); ++t) {
        auto& tv = tets_[t];
        const Vec3 *p0 = &vertices_[tv[0]], *p1 = &vertices_[tv[1]], *p2 = &vertices_[tv[2]], *p3 = &vertices_[tv[3]];
        double det = det3(*p1 - *p0, *p2 - *p0, *p3 - *p0);
        if (det < 0.0) {
            std::swap(tv[2], tv[3]);
            std::swap(p2, p3);
            det = -det;
        }
        volumes_[t] = det / 6.0;
        const Vec3 a = *p1 - *p0, b = *p2 - *p0, c = *p3 - *p0;
        // rows of the inverse Jacobian
        const Vec3 g1 = (1.0 / det) * cross(b, c);
        const Vec3 g2 = (1.0 / det) * cross(c, a);
        const Vec3 g3 = (1.0 / det) * cross(a, b);
        grads_[t] = {-(g1 + g2 + g3), g1, g2, g3};
    }
}

std::array<double, 4> TetMesh::barycentric(int k, const Vec3& x) const
{
    const auto& g = grads_[k];
    const Vec3 d = x - vertices_[tets_[k][0]];
    std::array<double, 4> b{};
    b[1] = dot(g[1], d);
    b[2] = dot(g[2], d);
    b[3] = dot(g[3], d);
    b[0] = 1.0 - b[1] - b[2] - b[3];
    return b;
}

Vec3 TetMesh::point(int k, const std::array<double, 4>& bary) const
{
    Vec3 x;
    for (int i = 0; i < 4; ++i) x += bary[i] * vertices_[tets_[k][i]];
    return x;
}

double TetMesh::diameter() const
{
    const Vec3 h = (1.0 / n_) * (hi_ - lo_);
    return norm(h);
}

TetMesh::Location TetMesh::locate(const Vec3& x) const
{
    std::array<int, 3> cell{};
    for (int d = 0; d < 3; ++d) {
        const double span = hi_[d] - lo_[d];
        if (x[d] < lo_[d] - 1e-12 * span || x[d] > hi_[d] + 1e-12 * span) {
            std::ostringstream msg;
            msg << "point (" << x.x << ", " << x.y << ", " << x.z << ") lies outside the mesh box";
            throw GeometryError(msg.str());
        }
        const int c = static_cast<int>(std::floor((x[d] - lo_[d]) / span * n_));
        cell[d] = std::clamp(c, 0, n_ - 1);
    }
    const int first = 6 * (cell[0] + n_ * (cell[1] + n_ * cell[2]));
    Location best{first, {}};
    double best_min = -std::numeric_limits<double>::max();
    for (int t = first; t < first + 6; ++t) {
        const auto b = barycentric(t, x);
        const double m = *std::min_element(b.begin(), b.end());
        if (m > best_min) {
            best_min = m;
            best = {t, b};
        }
        if (m >= 0.0) break;
    }
    return best;
}

FemSpace::FemSpace(const TetMesh& mesh) : mesh_(&mesh)
{
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.is_boundary_vertex(v)) dirichlet_.push_back(v);
}

double FemSpace::evaluate(const std::vector<double>& u, const Vec3& x) const
{
    const auto loc = mesh_->locate(x);
    const auto& t = mesh_->tet(loc.tet);
    double val = 0.0;
    for (int i = 0; i < 4; ++i) val += loc.bary[i] * u[t[i]];
    return val;
}

} // namespace mixdim
