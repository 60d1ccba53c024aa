#include "mixdim/stepper.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace mixdim {

CoupledSystem::CoupledSystem(TransportProblem problem, const Discretization& disc)
    : problem_(std::move(problem)), disc_(disc)
{
    const auto& p = problem_;
    if (!(disc.tau > 0.0)) throw ConfigError("time step must be positive");
    if (!(p.final_time >= disc.tau * (1.0 - 1e-12))) throw ConfigError("final time must be at least one time step");
    if (!(p.velocity_hat > 0.0)) throw ConfigError("vessel velocity must be a positive constant");
    disc.dg.validate();
    p.geometry.check_inside_box(p.box_lo, p.box_hi, disc.n_circ);

    mesh_ = std::make_unique<TetMesh>(p.box_lo, p.box_hi, disc.cells);
    fem_ = std::make_unique<FemSpace>(*mesh_);
    dg_ = std::make_unique<DgSpace>(Partition1D::uniform(p.geometry.length(), disc.elements), disc.degree);

    const auto rep = fem3d::check_coefficients(*fem_, p.kappa, p.velocity);
    if (!rep.warning.empty()) warnings_.push_back(rep.warning);
    const auto& geom = p.geometry;
    for (int j = 0; j <= 1000; ++j)
        if (!(p.kappa_hat(geom.length() * j / 1000) > 0.0)) throw CoefficientError("vessel diffusion must be positive");

    const LineFunction area = [&geom](double s) { return geom.section_area(s); };
    mass3d_ = fem3d::assemble_mass(*fem_);
    stiffness_ = fem3d::assemble_stiffness(*fem_, p.kappa);
    convection_ = fem3d::assemble_convection(*fem_, p.velocity);
    mass1d_ = dg1d::assemble_mass_weighted(*dg_, area);
    a_lambda_ = dg1d::assemble_a_lambda(*dg_, p.kappa_hat, area, disc.dg);
    b_lambda_ = dg1d::assemble_b_lambda(*dg_, p.velocity_hat, area);

    quad_ = std::make_unique<LineQuadrature>(geom, *fem_, *dg_, coupling::gauss_points(disc.degree), disc.n_circ);
    blocks_ = coupling::assemble(geom, *quad_, fem_->dof_count(), dg_->dof_count());

    const double inv_tau = 1.0 / disc.tau;
    SparseMatrix s_oo = add_scaled(inv_tau, mass3d_, stiffness_);
    s_oo = add_scaled(1.0, convection_, s_oo);
    s_oo = add_scaled(1.0, blocks_.oo, s_oo);
    SparseMatrix s_ll = add_scaled(inv_tau, mass1d_, a_lambda_);
    s_ll = add_scaled(1.0, b_lambda_, s_ll);
    s_ll = add_scaled(1.0, blocks_.ll, s_ll);
    const SparseMatrix zero_ol(blocks_.ol.rows(), blocks_.ol.cols());
    const SparseMatrix zero_lo(blocks_.lo.rows(), blocks_.lo.cols());
    operator_ = block_compose(s_oo, add_scaled(-1.0, blocks_.ol, zero_ol), add_scaled(-1.0, blocks_.lo, zero_lo), s_ll);
    fem3d::apply_dirichlet_rows(*fem_, operator_);
    lu_ = std::make_unique<Factorization>(operator_);

    one_hat_ = dg1d::l2_project(*dg_, [](double) { return 1.0; });
}

int CoupledSystem::step_count() const
{
    return static_cast<int>(std::ceil(problem_.final_time / disc_.tau - 1e-9));
}

CoupledState CoupledSystem::initialize() const
{
    CoupledState s;
    s.c.assign(fem_dofs(), 0.0);
    s.c_hat.assign(dg_dofs(), 0.0);
    if (problem_.initial) s.c = fem_->interpolate(problem_.initial);
    if (problem_.initial_hat) s.c_hat = dg1d::l2_project(*dg_, problem_.initial_hat);
    return s;
}

std::vector<double> CoupledSystem::rhs(const CoupledState& prev, double t) const
{
    const int n0 = fem_dofs(), n1 = dg_dofs();
    const double inv_tau = 1.0 / disc_.tau;
    std::vector<double> b(n0 + n1, 0.0);

    const auto m0 = mass3d_ * prev.c;
    const auto f0 = fem3d::assemble_load(*fem_, problem_.source, t);
    for (int i = 0; i < n0; ++i) b[i] = inv_tau * m0[i] + f0[i];
    if (problem_.line_source) {
        const auto& g = problem_.line_source;
        const auto fl = quad_->line_load([&g, t](double s) { return g(s, t); }, n0);
        for (int i = 0; i < n0; ++i) b[i] += fl[i];
    }

    const auto m1 = mass1d_ * prev.c_hat;
    const auto inflow = dg1d::assemble_inflow_rhs(*dg_, problem_.geometry.section_area(0.0), problem_.velocity_hat,
                                                  problem_.inflow(t));
    for (int i = 0; i < n1; ++i) b[n0 + i] = inv_tau * m1[i] + inflow[i];
    if (problem_.source_hat) {
        const auto f1 = dg1d::assemble_load(*dg_, problem_.source_hat, t);
        for (int i = 0; i < n1; ++i) b[n0 + i] += f1[i];
    }

    fem3d::apply_dirichlet_rhs(*fem_, b, problem_.dirichlet, t);
    return b;
}

CoupledState CoupledSystem::step(const CoupledState& prev) const
{
    CoupledState next;
    next.step = prev.step + 1;
    next.t = next.step * disc_.tau;
    const auto x = lu_->solve(rhs(prev, next.t));
    const int n0 = fem_dofs();
    next.c.assign(x.begin(), x.begin() + n0);
    next.c_hat.assign(x.begin() + n0, x.end());
    return next;
}

double CoupledSystem::energy(const CoupledState& s) const
{
    return mass3d_.bilinear(s.c, s.c) + mass1d_.bilinear(s.c_hat, s.c_hat);
}

double CoupledSystem::vessel_mass(const CoupledState& s) const { return mass1d_.bilinear(one_hat_, s.c_hat); }

int snapshot_step(double t_snap, double tau) { return static_cast<int>(std::lround(t_snap / tau)); }

RunResult run(const CoupledSystem& system, const std::vector<double>& snapshot_times, const Observer& observer)
{
    const auto start = std::chrono::steady_clock::now();
    RunResult out;
    out.report.warnings = system.warnings();
    const double tau = system.discretization().tau;
    std::vector<int> fire;
    for (double t : snapshot_times) fire.push_back(snapshot_step(t, tau));
    const auto notify = [&](const CoupledState& s) {
        if (!observer) return;
        for (int n : fire)
            if (n == s.step) {
                observer(s.step, s.t, s);
                break;
            }
    };

    CoupledState state = system.initialize();
    out.report.energy.push_back(system.energy(state));
    notify(state);
    const int steps = system.step_count();
    for (int n = 1; n <= steps; ++n) {
        state = system.step(state);
        out.report.max_residual = std::max(out.report.max_residual, system.factorization().last_residual());
        out.report.energy.push_back(system.energy(state));
        notify(state);
    }
    out.report.steps = steps;
    out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.state = std::move(state);
    return out;
}

} // namespace mixdim
