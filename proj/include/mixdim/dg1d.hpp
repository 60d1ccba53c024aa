#pragma once

#include "mixdim/linalg.hpp"

#include <functional>
#include <vector>

namespace mixdim {

using LineFunction = std::function<double(double)>;

/// 0 = s_0 < s_1 < ... < s_N = L
class Partition1D {
public:
    explicit Partition1D(std::vector<double> nodes);
    static Partition1D uniform(double length, int elements);

    int element_count() const { return static_cast<int>(nodes_.size()) - 1; }
    const std::vector<double>& nodes() const { return nodes_; }
    double node(int i) const { return nodes_[i]; }
    double element_size(int e) const { return nodes_[e + 1] - nodes_[e]; }
    double length() const { return nodes_.back(); }
    /// h_Lambda: the largest element size.
    double mesh_size() const { return h_max_; }
    /// Element containing s; interior nodes belong to the element on their right.
    int element_of(double s) const;

private:
    std::vector<double> nodes_;
    double h_max_ = 0.0;
};

/// Discontinuous piecewise polynomials of a fixed degree. The element basis is
/// P_m(xi), the Legendre polynomials in the local coordinate xi in [-1, 1].
class DgSpace {
public:
    DgSpace(Partition1D partition, int degree);

    const Partition1D& partition() const { return partition_; }
    int degree() const { return degree_; }
    int local_size() const { return degree_ + 1; }
    int element_count() const { return partition_.element_count(); }
    int dof_count() const { return element_count() * local_size(); }
    int dof(int element, int m) const { return element * local_size() + m; }

    double local_coordinate(int element, double s) const;
    double basis(int element, int m, double s) const;
    double basis_derivative(int element, int m, double s) const;

    double evaluate(std::span<const double> u, int element, double s) const;
    double evaluate_derivative(std::span<const double> u, int element, double s) const;
    /// Evaluates using element_of(s).
    double evaluate(std::span<const double> u, double s) const;

    enum class Side { minus, plus };
    /// One-sided value at node s_i; the minus side is the element to the left.
    double trace(std::span<const double> u, int node, Side side) const;
    /// [u] = u(s_i^-) - u(s_i^+) at an interior node 1 <= i <= N-1.
    double jump(std::span<const double> u, int node) const;
    /// {u} = (u(s_i^-) + u(s_i^+)) / 2 at an interior node.
    double average(std::span<const double> u, int node) const;

private:
    void check_interior(int node) const;

    Partition1D partition_;
    int degree_;
};

/// IPDG parameters. epsilon in {-1, 0, 1}; penalty sigma checked against sigma_min
/// unless epsilon = -1.
struct DgParams {
    int epsilon = 1;
    double sigma = 50.0;
    double sigma_min = 50.0;

    void validate() const;
};

namespace dg1d {

/// Gauss points per element used for operator assembly (degree + 2).
int assembly_points(int degree);

SparseMatrix assemble_mass_weighted(const DgSpace& space, const LineFunction& area);

SparseMatrix assemble_a_lambda(const DgSpace& space, const LineFunction& kappa_hat, const LineFunction& area,
                               const DgParams& params);

/// Upwind advection form for a positive constant velocity; throws ConfigError if u_hat <= 0.
SparseMatrix assemble_b_lambda(const DgSpace& space, double u_hat, const LineFunction& area);

/// |D(0)| u_hat c_in v(0)
std::vector<double> assemble_inflow_rhs(const DgSpace& space, double area_at_inlet, double u_hat, double c_in);

std::vector<double> assemble_load(const DgSpace& space, const std::function<double(double, double)>& f, double t);

double dg_seminorm(const DgSpace& space, std::span<const double> v, double sigma);

/// Element-wise unweighted L2 projection.
std::vector<double> l2_project(const DgSpace& space, const LineFunction& f);

} // namespace dg1d
} // namespace mixdim
