#include "mixdim/dg1d.hpp"

#include "mixdim/common.hpp"
#include "mixdim/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace mixdim {

Partition1D::Partition1D(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 2) throw ConfigError("partition needs at least one element");
    if (nodes_.front() != 0.0) throw ConfigError("partition must start at s = 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) throw ConfigError("partition nodes must be strictly increasing");
        h_max_ = std::max(h_max_, nodes_[i] - nodes_[i - 1]);
    }
}

Partition1D Partition1D::uniform(double length, int elements)
{
    if (elements < 1) throw ConfigError("partition needs at least one element");
    std::vector<double> nodes(elements + 1);
    for (int i = 0; i <= elements; ++i) nodes[i] = (i == elements) ? length : length * i / elements;
    return Partition1D(std::move(nodes));
}

int Partition1D::element_of(double s) const
{
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
    const int e = static_cast<int>(it - nodes_.begin()) - 1;
    return std::clamp(e, 0, element_count() - 1);
}

DgSpace::DgSpace(Partition1D partition, int degree) : partition_(std::move(partition)), degree_(degree)
{
    if (degree < 1) throw ConfigError("DG degree must be at least 1");
}

double DgSpace::local_coordinate(int e, double s) const
{
    return 2.0 * (s - partition_.node(e)) / partition_.element_size(e) - 1.0;
}

double DgSpace::basis(int e, int m, double s) const { return legendre(m, local_coordinate(e, s)); }

double DgSpace::basis_derivative(int e, int m, double s) const
{
    return legendre_derivative(m, local_coordinate(e, s)) * 2.0 / partition_.element_size(e);
}

double DgSpace::evaluate(std::span<const double> u, int e, double s) const
{
    double v = 0.0;
    for (int m = 0; m <= degree_; ++m) v += u[dof(e, m)] * basis(e, m, s);
    return v;
}

double DgSpace::evaluate_derivative(std::span<const double> u, int e, double s) const
{
    double v = 0.0;
    for (int m = 0; m <= degree_; ++m) v += u[dof(e, m)] * basis_derivative(e, m, s);
    return v;
}

double DgSpace::evaluate(std::span<const double> u, double s) const
{
    return evaluate(u, partition_.element_of(s), s);
}

void DgSpace::check_interior(int node) const
{
    if (node < 1 || node > element_count() - 1) {
        std::ostringstream msg;
        msg << "node " << node << " is not an interior node (1.." << element_count() - 1 << ")";
        throw DomainError(msg.str());
    }
}

double DgSpace::trace(std::span<const double> u, int node, Side side) const
{
    const double s = partition_.node(node);
    if (side == Side::minus) {
        if (node < 1) throw DomainError("no element to the left of s_0");
        return evaluate(u, node - 1, s);
    }
    if (node > element_count() - 1) throw DomainError("no element to the right of s_N");
    return evaluate(u, node, s);
}

double DgSpace::jump(std::span<const double> u, int node) const
{
    check_interior(node);
    return trace(u, node, Side::minus) - trace(u, node, Side::plus);
}

double DgSpace::average(std::span<const double> u, int node) const
{
    check_interior(node);
    return 0.5 * (trace(u, node, Side::minus) + trace(u, node, Side::plus));
}

void DgParams::validate() const
{
    if (epsilon != -1 && epsilon != 0 && epsilon != 1) throw ConfigError("epsilon must be -1, 0 or 1");
    if (!(sigma > 0.0)) throw ConfigError("penalty sigma must be positive");
    if (epsilon == -1) {
        if (sigma < 1.0) throw ConfigError("penalty sigma must be at least 1 for epsilon = -1");
    } else if (sigma < sigma_min) {
        std::ostringstream msg;
        msg << "penalty sigma = " << sigma << " below the threshold " << sigma_min << " required for epsilon = " << epsilon;
        throw ConfigError(msg.str());
    }
}

namespace dg1d {

int assembly_points(int degree) { return degree + 2; }

namespace {

// Calls f(element, s, weight) for every Gauss point of every element.
template <class F>
void for_each_gauss_point(const DgSpace& space, int points, F&& f)
{
    const auto rule = gauss_legendre(points);
    const auto& part = space.partition();
    for (int e = 0; e < space.element_count(); ++e) {
        const double a = part.node(e), h = part.element_size(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q)
            f(e, a + 0.5 * h * (rule.points[q] + 1.0), 0.5 * h * rule.weights[q]);
    }
}

struct Trace {
    int element;
    double sign; // +1 for the minus (left) side in a jump, -1 for the plus side
    std::vector<double> value, derivative;
};

std::array<Trace, 2> node_traces(const DgSpace& space, int node)
{
    const double s = space.partition().node(node);
    std::array<Trace, 2> tr{Trace{node - 1, 1.0, {}, {}}, Trace{node, -1.0, {}, {}}};
    for (auto& t : tr)
        for (int m = 0; m <= space.degree(); ++m) {
            t.value.push_back(space.basis(t.element, m, s));
            t.derivative.push_back(space.basis_derivative(t.element, m, s));
        }
    return tr;
}

} // namespace

SparseMatrix assemble_mass_weighted(const DgSpace& space, const LineFunction& area)
{
    std::vector<Triplet> t;
    const int k = space.degree();
    for_each_gauss_point(space, assembly_points(k), [&](int e, double s, double w) {
        const double a = area(s);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j)
                t.push_back({space.dof(e, i), space.dof(e, j), w * a * space.basis(e, i, s) * space.basis(e, j, s)});
    });
    return SparseMatrix::from_triplets(space.dof_count(), space.dof_count(), std::move(t));
}

SparseMatrix assemble_a_lambda(const DgSpace& space, const LineFunction& kappa_hat, const LineFunction& area,
                               const DgParams& params)
{
    params.validate();
    std::vector<Triplet> t;
    const int k = space.degree();
    for_each_gauss_point(space, assembly_points(k), [&](int e, double s, double w) {
        const double c = area(s) * kappa_hat(s);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j)
                t.push_back({space.dof(e, i), space.dof(e, j),
                             w * c * space.basis_derivative(e, i, s) * space.basis_derivative(e, j, s)});
    });

    const double penalty = params.sigma / space.partition().mesh_size();
    const double eps = params.epsilon;
    for (int node = 1; node < space.element_count(); ++node) {
        const double s = space.partition().node(node);
        const double c = area(s) * kappa_hat(s);
        const auto tr = node_traces(space, node);
        for (const auto& test : tr)
            for (const auto& trial : tr)
                for (int i = 0; i <= k; ++i)
                    for (int j = 0; j <= k; ++j) {
                        const double consistency = -c * 0.5 * trial.derivative[j] * test.sign * test.value[i];
                        const double symmetry = -eps * c * 0.5 * test.derivative[i] * trial.sign * trial.value[j];
                        const double jumps = penalty * trial.sign * trial.value[j] * test.sign * test.value[i];
                        t.push_back({space.dof(test.element, i), space.dof(trial.element, j),
                                     consistency + symmetry + jumps});
                    }
    }
    return SparseMatrix::from_triplets(space.dof_count(), space.dof_count(), std::move(t));
}

SparseMatrix assemble_b_lambda(const DgSpace& space, double u_hat, const LineFunction& area)
{
    if (!(u_hat > 0.0)) throw ConfigError("vessel velocity must be a positive constant");
    std::vector<Triplet> t;
    const int k = space.degree();
    for_each_gauss_point(space, assembly_points(k), [&](int e, double s, double w) {
        const double c = area(s) * u_hat;
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j)
                t.push_back({space.dof(e, i), space.dof(e, j),
                             -w * c * space.basis(e, j, s) * space.basis_derivative(e, i, s)});
    });

    // upwind flux: trial trace from the left element
    for (int node = 1; node < space.element_count(); ++node) {
        const double c = area(space.partition().node(node)) * u_hat;
        const auto tr = node_traces(space, node);
        const auto& upwind = tr[0];
        for (const auto& test : tr)
            for (int i = 0; i <= k; ++i)
                for (int j = 0; j <= k; ++j)
                    t.push_back({space.dof(test.element, i), space.dof(upwind.element, j),
                                 c * upwind.value[j] * test.sign * test.value[i]});
    }

    const int last = space.element_count() - 1;
    const double L = space.partition().length();
    const double c = area(L) * u_hat;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
            t.push_back({space.dof(last, i), space.dof(last, j), c * space.basis(last, j, L) * space.basis(last, i, L)});
    return SparseMatrix::from_triplets(space.dof_count(), space.dof_count(), std::move(t));
}

std::vector<double> assemble_inflow_rhs(const DgSpace& space, double area_at_inlet, double u_hat, double c_in)
{
    std::vector<double> r(space.dof_count(), 0.0);
    for (int m = 0; m <= space.degree(); ++m) r[space.dof(0, m)] = area_at_inlet * u_hat * c_in * space.basis(0, m, 0.0);
    return r;
}

std::vector<double> assemble_load(const DgSpace& space, const std::function<double(double, double)>& f, double t)
{
    std::vector<double> r(space.dof_count(), 0.0);
    const int k = space.degree();
    for_each_gauss_point(space, k + 3, [&](int e, double s, double w) {
        const double fw = w * f(s, t);
        for (int i = 0; i <= k; ++i) r[space.dof(e, i)] += fw * space.basis(e, i, s);
    });
    return r;
}

double dg_seminorm(const DgSpace& space, std::span<const double> v, double sigma)
{
    double sum = 0.0;
    for_each_gauss_point(space, space.degree() + 1, [&](int e, double s, double w) {
        const double d = space.evaluate_derivative(v, e, s);
        sum += w * d * d;
    });
    const double penalty = sigma / space.partition().mesh_size();
    for (int node = 1; node < space.element_count(); ++node) {
        const double j = space.jump(v, node);
        sum += penalty * j * j;
    }
    return std::sqrt(sum);
}

std::vector<double> l2_project(const DgSpace& space, const LineFunction& f)
{
    std::vector<double> u(space.dof_count(), 0.0);
    const int k = space.degree();
    // (P_m, P_m) on [-1, 1] is 2/(2m+1); the physical weight carries h/2.
    for_each_gauss_point(space, k + 6, [&](int e, double s, double w) {
        const double h = space.partition().element_size(e);
        const double fv = f(s);
        for (int m = 0; m <= k; ++m) u[space.dof(e, m)] += w * fv * space.basis(e, m, s) * (2 * m + 1) / h;
    });
    return u;
}

} // namespace dg1d
} // namespace mixdim
