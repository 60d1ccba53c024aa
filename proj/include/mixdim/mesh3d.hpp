#pragma once

#include "mixdim/common.hpp"

#include <array>
#include <vector>

namespace mixdim {

/// Structured Kuhn tetrahedral mesh of an axis-aligned box: every cube cell is
/// split into 6 tetrahedra sharing the cell's main diagonal.
class TetMesh {
public:
    TetMesh(Vec3 lo, Vec3 hi, int cells_per_axis);

    int cells_per_axis() const { return n_; }
    const Vec3& lower() const { return lo_; }
    const Vec3& upper() const { return hi_; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int tet_count() const { return static_cast<int>(tets_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::array<int, 4>& tet(int k) const { return tets_[k]; }
    bool is_boundary_vertex(int v) const { return boundary_[v] != 0; }

    double volume(int k) const { return volumes_[k]; }
    /// Gradients of the four barycentric (P1 shape) functions, constant per tet.
    const std::array<Vec3, 4>& shape_gradients(int k) const { return grads_[k]; }
    std::array<double, 4> barycentric(int k, const Vec3& x) const;
    Vec3 point(int k, const std::array<double, 4>& bary) const;

    /// Longest tet edge (mesh diameter).
    double diameter() const;
    /// Uniform cell edge, i.e. the 1/n table label on the unit cube.
    double cell_size() const { return (hi_.x - lo_.x) / n_; }

    struct Location {
        int tet;
        std::array<double, 4> bary;
    };
    /// O(1) point location: cell by floor division, then the cell's six tets.
    /// Throws GeometryError outside the box (1e-12 tolerance).
    Location locate(const Vec3& x) const;

private:
    int vertex_id(int i, int j, int k) const { return i + (n_ + 1) * (j + (n_ + 1) * k); }

    Vec3 lo_, hi_;
    int n_;
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<char> boundary_;
    std::vector<double> volumes_;
    std::vector<std::array<Vec3, 4>> grads_;
};

inline TetMesh build_box_mesh(Vec3 lo, Vec3 hi, int n) { return TetMesh(lo, hi, n); }

/// Continuous P1 space on a TetMesh; dofs are vertices, boundary vertices are Dirichlet.
class FemSpace {
public:
    explicit FemSpace(const TetMesh& mesh);

    const TetMesh& mesh() const { return *mesh_; }
    int dof_count() const { return mesh_->vertex_count(); }
    bool is_dirichlet(int dof) const { return mesh_->is_boundary_vertex(dof); }
    const std::vector<int>& dirichlet_dofs() const { return dirichlet_; }

    /// Shape values at barycentric coordinates (the coordinates themselves for P1).
    static std::array<double, 4> shape_values(const std::array<double, 4>& bary) { return bary; }

    /// Nodal interpolant of g.
    template <class F>
    std::vector<double> interpolate(F&& g) const
    {
        std::vector<double> u(dof_count());
        for (int v = 0; v < dof_count(); ++v) u[v] = g(mesh_->vertices()[v]);
        return u;
    }

    double evaluate(const std::vector<double>& u, const Vec3& x) const;

private:
    const TetMesh* mesh_;
    std::vector<int> dirichlet_;
};

} // namespace mixdim
