#pragma once

#include "mixdim/stepper.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mixdim {

/// Manufactured pair on the unit cube with a vertical vessel on the z-axis:
///   c_hat(z, t) = t (sin(pi z) + 2)
///   c = c_hat/2 * (1 + R ln(r/R)) for r > R, c_hat/2 inside,
/// with kappa = kappa_hat = gamma = U_hat = 1 and U = (0, 0, 1).
class ManufacturedSolution {
public:
    explicit ManufacturedSolution(double radius = 0.05) : radius_(radius) {}

    double radius() const { return radius_; }

    double c_hat(double z, double t) const;
    double c_hat_dz(double z, double t) const;
    double c(const Vec3& x, double t) const;
    Vec3 grad_c(const Vec3& x, double t) const;

    /// Pointwise 3D source dc/dt - lap c + dc/dz (away from r = R).
    double source(const Vec3& x, double t) const;
    /// 1D source in arclength s = z + 1/2.
    double source_hat(double s, double t) const;
    double inflow(double t) const { return t; }
    /// Line load g with int_Lambda g v_bar: the conormal jump of c across the
    /// wall plus the exchange term, -(kappa + gamma)/2 |dD| c_hat.
    double wall_source(double s, double t) const;

    /// The full coupled problem; wall_source may be dropped for comparison runs.
    TransportProblem problem(double final_time = 1.0, bool with_wall_source = true) const;

private:
    double weight(double r) const; // 1 + R ln(r/R) outside, 1 inside
    double radius_;
};

struct Errors3d {
    double l2 = 0.0;
    double grad = 0.0;
};
struct Errors1d {
    double l2 = 0.0;
    double grad = 0.0; // broken
};

/// Order-4 quadrature of |c - c_h|^2 and |grad c - grad c_h|^2 over the mesh.
Errors3d error_norms_3d(const FemSpace& fem, std::span<const double> c_h,
                        const std::function<double(const Vec3&)>& exact,
                        const std::function<Vec3(const Vec3&)>& exact_grad);

/// Element-wise Gauss quadrature with degree + 3 points.
Errors1d error_norms_1d(const DgSpace& dg, std::span<const double> c_h, const LineFunction& exact,
                        const LineFunction& exact_ds);

/// log(e_coarse / e_fine) / log(h_coarse / h_fine) for consecutive levels.
std::vector<double> convergence_rates(const std::vector<double>& h, const std::vector<double>& errors);

struct StudyParams {
    int degree = 1;
    DgParams dg{1, 50.0, 50.0};
    int n_circ = coupling::default_circle_points;
    double final_time = 1.0;
    double tau_factor = 0.1; // tau = tau_factor * h
    bool wall_source = true;
};

struct ConvergenceLevel {
    int n = 0;
    double h = 0.0;
    Errors3d err3d;
    Errors1d err1d;
    double max_residual = 0.0;
    double wall_seconds = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> grad3d_rates, l2_3d_rates, grad1d_rates, l2_1d_rates;
    double max_residual = 0.0;
};

/// Finite-difference residual checks of the derived sources.
struct SourceCheck {
    double max_residual_3d = 0.0;
    double max_residual_1d = 0.0;
    double max_inflow_error = 0.0;
    bool passed = false;
};
SourceCheck check_manufactured_sources(const ManufacturedSolution& m, int samples = 1000, unsigned seed = 12345);

/// Runs the manufactured problem at each level (N = n, h = 1/n) and measures errors at T.
/// Throws SolverError if the source check fails.
ConvergenceReport convergence_study(const std::vector<int>& levels, const StudyParams& params,
                                    const std::function<void(const CoupledSystem&, const CoupledState&)>& on_level = {});

/// Diagonal-vessel experiment cases: 1 constant radius/gamma, 2 tanh radius,
/// 3 tanh radius and piecewise gamma.
TransportProblem diagonal_problem(int case_id, double final_time = 1.0);
/// Number of 1D elements for cell count n: ceil(L n).
int diagonal_elements(double length, int n);

struct SelfConvergenceLevel {
    int n = 0;
    double h = 0.0;
    double err3d = 0.0, err1d = 0.0;
    double rel3d = 0.0, rel1d = 0.0;
    double vessel_mass = 0.0;
    double max_residual = 0.0;
};

struct SelfConvergenceReport {
    int case_id = 1;
    int fine_n = 0;
    std::vector<SelfConvergenceLevel> levels;
    std::vector<double> rate3d, rate1d;
    double fine_vessel_mass = 0.0;
    double max_residual = 0.0;
};

/// L2 differences between a coarse solution and a reference solution on another
/// discretization of the same problem.
double l2_difference_3d(const CoupledSystem& coarse, std::span<const double> c, const CoupledSystem& fine,
                        std::span<const double> c_fine);
double l2_difference_1d(const DgSpace& coarse, std::span<const double> c, const DgSpace& fine,
                        std::span<const double> c_fine);

Discretization diagonal_discretization(const TransportProblem& problem, int n, const StudyParams& params);

SelfConvergenceReport self_convergence(int case_id, const std::vector<int>& coarse_levels, int fine_n,
                                       const StudyParams& params,
                                       const std::function<void(const CoupledSystem&, const CoupledState&)>& on_fine = {});

/// Reference error levels of the manufactured problem for n = 4, 8, 16, 32, 64.
struct ReferenceErrors {
    int n;
    double grad3d, l2_3d, grad1d, l2_1d;
};
const std::vector<ReferenceErrors>& manufactured_reference();

/// Outcome of one acceptance band.
struct BandCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Factor-2 error bands against manufactured_reference() plus the rate bands.
std::vector<BandCheck> check_convergence_bands(const ConvergenceReport& report);

/// Monotone decrease of both errors; for case 1 also the finest-pair 3D rate >= 1.
std::vector<BandCheck> check_self_convergence_bands(const SelfConvergenceReport& report);

/// Worker count for level fan-out: SOLVER_THREADS if set, else hardware concurrency.
int worker_count();

} // namespace mixdim
