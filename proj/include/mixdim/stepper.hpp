#pragma once

#include "mixdim/coupling.hpp"
#include "mixdim/dg1d.hpp"
#include "mixdim/fem3d.hpp"
#include "mixdim/geometry.hpp"
#include "mixdim/linalg.hpp"
#include "mixdim/mesh3d.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mixdim {

using LineSpaceTime = std::function<double(double s, double t)>;

/// Continuous data of the coupled tissue/vessel transport problem.
struct TransportProblem {
    Vec3 box_lo{-0.5, -0.5, -0.5};
    Vec3 box_hi{0.5, 0.5, 0.5};
    VesselGeometry geometry;

    ScalarField3 kappa = ScalarField3::constant(1.0);
    LineFunction kappa_hat = [](double) { return 1.0; };
    VectorField3 velocity = VectorField3::constant({0.0, 0.0, 0.0});
    double velocity_hat = 1.0;

    ScalarField3 source = ScalarField3::zero();
    LineSpaceTime source_hat;        // empty means zero
    LineSpaceTime line_source;       // load int_Lambda g v_bar on the 3D side; empty means zero
    std::function<double(double)> inflow = [](double) { return 0.0; };
    ScalarField3 dirichlet = ScalarField3::zero();

    std::function<double(const Vec3&)> initial;  // empty means zero
    LineFunction initial_hat;                    // empty means zero

    double final_time = 1.0;
};

struct Discretization {
    int cells = 4;      // 3D cells per axis
    int elements = 4;   // 1D elements
    int degree = 1;     // DG degree k2
    DgParams dg;
    double tau = 0.025;
    int n_circ = coupling::default_circle_points;

    /// tau = 0.1 * (cell size) on the problem's box.
    static double default_tau(const TransportProblem& p, int cells) { return 0.1 * (p.box_hi.x - p.box_lo.x) / cells; }
};

struct CoupledState {
    std::vector<double> c;
    std::vector<double> c_hat;
    double t = 0.0;
    int step = 0;
};

/// All time-independent operators of one discretization, plus the factorized
/// monolithic matrix [[M/tau + A + B + Coo, -Col], [-Clo, M/tau + A + B + Cll]].
class CoupledSystem {
public:
    CoupledSystem(TransportProblem problem, const Discretization& disc);

    const TransportProblem& problem() const { return problem_; }
    const Discretization& discretization() const { return disc_; }
    const TetMesh& mesh() const { return *mesh_; }
    const FemSpace& fem() const { return *fem_; }
    const DgSpace& dg() const { return *dg_; }
    const LineQuadrature& line_quadrature() const { return *quad_; }
    const CouplingBlocks& coupling() const { return blocks_; }

    const SparseMatrix& mass3d() const { return mass3d_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    const SparseMatrix& convection() const { return convection_; }
    const SparseMatrix& mass1d() const { return mass1d_; }
    const SparseMatrix& a_lambda() const { return a_lambda_; }
    const SparseMatrix& b_lambda() const { return b_lambda_; }
    const SparseMatrix& operator_matrix() const { return operator_; }
    const Factorization& factorization() const { return *lu_; }

    int fem_dofs() const { return fem_->dof_count(); }
    int dg_dofs() const { return dg_->dof_count(); }
    int step_count() const;

    CoupledState initialize() const;
    /// Right-hand side for the step ending at time t, Dirichlet rows included.
    std::vector<double> rhs(const CoupledState& previous, double t) const;
    CoupledState step(const CoupledState& previous) const;
    double energy(const CoupledState& state) const;
    /// int_Lambda |D| c_hat
    double vessel_mass(const CoupledState& state) const;

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    TransportProblem problem_;
    Discretization disc_;
    std::unique_ptr<TetMesh> mesh_;
    std::unique_ptr<FemSpace> fem_;
    std::unique_ptr<DgSpace> dg_;
    std::unique_ptr<LineQuadrature> quad_;
    CouplingBlocks blocks_;
    SparseMatrix mass3d_, stiffness_, convection_, mass1d_, a_lambda_, b_lambda_, operator_;
    std::unique_ptr<Factorization> lu_;
    std::vector<double> one_hat_; // L2 projection of 1 for vessel mass
    std::vector<std::string> warnings_;
};

using Observer = std::function<void(int step, double t, const CoupledState& state)>;

struct RunReport {
    int steps = 0;
    double max_residual = 0.0;
    std::vector<double> energy; // E^0 .. E^steps
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

struct RunResult {
    CoupledState state;
    RunReport report;
};

/// Step at which a snapshot at time t_snap fires: round(t_snap / tau).
int snapshot_step(double t_snap, double tau);

/// Runs ceil(T / tau) backward Euler steps. The observer fires for every
/// snapshot time (step 0 for t = 0).
RunResult run(const CoupledSystem& system, const std::vector<double>& snapshot_times = {},
              const Observer& observer = {});

} // namespace mixdim
