#include "mixdim/verify.hpp"

#include "mixdim/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace mixdim {

// ---------------------------------------------------------------------------
// Manufactured solution

double ManufacturedSolution::c_hat(double z, double t) const { return t * (std::sin(pi * z) + 2.0); }

double ManufacturedSolution::c_hat_dz(double z, double t) const { return pi * t * std::cos(pi * z); }

double ManufacturedSolution::weight(double r) const
{
    return r > radius_ ? 1.0 + radius_ * std::log(r / radius_) : 1.0;
}

double ManufacturedSolution::c(const Vec3& x, double t) const
{
    const double r = std::hypot(x.x, x.y);
    return 0.5 * weight(r) * c_hat(x.z, t);
}

Vec3 ManufacturedSolution::grad_c(const Vec3& x, double t) const
{
    const double r = std::hypot(x.x, x.y);
    const double ch = c_hat(x.z, t);
    Vec3 g{0.0, 0.0, 0.5 * weight(r) * c_hat_dz(x.z, t)};
    if (r > radius_) {
        // d/dr (R ln(r/R)) = R/r, times x/r
        const double a = 0.5 * ch * radius_ / (r * r);
        g.x = a * x.x;
        g.y = a * x.y;
    }
    return g;
}

double ManufacturedSolution::source(const Vec3& x, double t) const
{
    const double r = std::hypot(x.x, x.y);
    const double sz = std::sin(pi * x.z), cz = std::cos(pi * x.z);
    return 0.5 * weight(r) * ((sz + 2.0) + pi * pi * t * sz + pi * t * cz);
}

double ManufacturedSolution::source_hat(double s, double t) const
{
    const double z = s - 0.5;
    const double sz = std::sin(pi * z), cz = std::cos(pi * z);
    const double R = radius_;
    return pi * R * R * ((sz + 2.0) + pi * pi * t * sz + pi * t * cz) + pi * R * t * (sz + 2.0);
}

double ManufacturedSolution::wall_source(double s, double t) const
{
    constexpr double kappa = 1.0, gamma = 1.0;
    return -0.5 * (kappa + gamma) * 2.0 * pi * radius_ * c_hat(s - 0.5, t);
}

TransportProblem ManufacturedSolution::problem(double final_time, bool with_wall_source) const
{
    TransportProblem p{
        .geometry = VesselGeometry({0.0, 0.0, -0.5}, {0.0, 0.0, 0.5}, RadiusProfile::constant(radius_),
                                   PermeabilityProfile::constant(1.0)),
    };
    const ManufacturedSolution m = *this;
    p.velocity = VectorField3::constant({0.0, 0.0, 1.0});
    p.velocity_hat = 1.0;
    p.source = {[m](const Vec3& x, double t) { return m.source(x, t); }, false};
    p.source_hat = [m](double s, double t) { return m.source_hat(s, t); };
    if (with_wall_source) p.line_source = [m](double s, double t) { return m.wall_source(s, t); };
    p.inflow = [m](double t) { return m.inflow(t); };
    p.dirichlet = {[m](const Vec3& x, double t) { return m.c(x, t); }, false};
    p.initial = [m](const Vec3& x) { return m.c(x, 0.0); };
    p.initial_hat = [m](double s) { return m.c_hat(s - 0.5, 0.0); };
    p.final_time = final_time;
    return p;
}

// ---------------------------------------------------------------------------
// Source oracle: fourth-order central differences of the exact pair.

namespace {

template <class F>
double d1(F&& f, double x, double h)
{
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <class F>
double d2(F&& f, double x, double h)
{
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

} // namespace

SourceCheck check_manufactured_sources(const ManufacturedSolution& m, int samples, unsigned seed)
{
    SourceCheck out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-0.5, 0.5), time(0.0, 1.0);
    const double R = m.radius();
    const double h = 1e-3;

    for (int n = 0; n < samples;) {
        const Vec3 x{coord(rng), coord(rng), coord(rng)};
        const double t = time(rng);
        const double r = std::hypot(x.x, x.y);
        if (r > 0.9 * R && r < 1.1 * R) continue;
        ++n;
        const auto cx = [&](double v) { return m.c({v, x.y, x.z}, t); };
        const auto cy = [&](double v) { return m.c({x.x, v, x.z}, t); };
        const auto cz = [&](double v) { return m.c({x.x, x.y, v}, t); };
        const auto ct = [&](double v) { return m.c(x, v); };
        const double lap = d2(cx, x.x, h) + d2(cy, x.y, h) + d2(cz, x.z, h);
        const double residual = d1(ct, t, h) - lap + d1(cz, x.z, h);
        out.max_residual_3d = std::max(out.max_residual_3d, std::abs(residual - m.source(x, t)));
    }

    // 1D: |D| c_t - (|D| c_s)_s + (|D| c)_s + |dD| (c_hat - c_bar), with c_bar
    // averaged from the 3D field on the wall circle.
    const double area = pi * R * R, circ = 2.0 * pi * R;
    std::uniform_real_distribution<double> arc(0.0, 1.0);
    for (int n = 0; n < samples; ++n) {
        const double s = arc(rng), t = time(rng);
        const auto ch = [&](double v) { return m.c_hat(v - 0.5, t); };
        const auto cht = [&](double v) { return m.c_hat(s - 0.5, v); };
        double c_bar = 0.0;
        constexpr int nc = 32;
        for (int j = 0; j < nc; ++j) {
            const double th = 2.0 * pi * j / nc;
            c_bar += m.c({R * std::cos(th), R * std::sin(th), s - 0.5}, t) / nc;
        }
        const double residual =
            area * d1(cht, t, h) - area * d2(ch, s, h) + area * d1(ch, s, h) + circ * (ch(s) - c_bar);
        out.max_residual_1d = std::max(out.max_residual_1d, std::abs(residual - m.source_hat(s, t)));

        // inlet condition: c_in = c_hat(0) - (kappa_hat / U_hat) dc_hat/ds (0)
        const auto ch0 = [&](double v) { return m.c_hat(v - 0.5, t); };
        const double c_in = ch0(0.0) - d1(ch0, 0.0, h);
        out.max_inflow_error = std::max(out.max_inflow_error, std::abs(c_in - m.inflow(t)));
    }
    out.passed = out.max_residual_3d <= 1e-5 && out.max_residual_1d <= 1e-8 && out.max_inflow_error <= 1e-8;
    return out;
}

// ---------------------------------------------------------------------------
// Error norms

Errors3d error_norms_3d(const FemSpace& fem, std::span<const double> c_h,
                        const std::function<double(const Vec3&)>& exact,
                        const std::function<Vec3(const Vec3&)>& exact_grad)
{
    const auto& mesh = fem.mesh();
    const auto& rule = tet_quadrature(4);
    double l2 = 0.0, h1 = 0.0;
    for (int k = 0; k < mesh.tet_count(); ++k) {
        const auto& tv = mesh.tet(k);
        const auto& g = mesh.shape_gradients(k);
        Vec3 grad_h;
        for (int i = 0; i < 4; ++i) grad_h += c_h[tv[i]] * g[i];
        const double scale = 6.0 * mesh.volume(k);
        for (const auto& q : rule) {
            const Vec3 x = mesh.point(k, q.bary);
            double v = 0.0;
            for (int i = 0; i < 4; ++i) v += q.bary[i] * c_h[tv[i]];
            const double e = exact(x) - v;
            const Vec3 ge = exact_grad(x) - grad_h;
            l2 += q.weight * scale * e * e;
            h1 += q.weight * scale * dot(ge, ge);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

Errors1d error_norms_1d(const DgSpace& dg, std::span<const double> c_h, const LineFunction& exact,
                        const LineFunction& exact_ds)
{
    const auto rule = gauss_legendre(dg.degree() + 3);
    const auto& part = dg.partition();
    double l2 = 0.0, h1 = 0.0;
    for (int e = 0; e < dg.element_count(); ++e) {
        const double a = part.node(e), h = part.element_size(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = a + 0.5 * h * (rule.points[q] + 1.0), w = 0.5 * h * rule.weights[q];
            const double ev = exact(s) - dg.evaluate(c_h, e, s);
            const double ed = exact_ds(s) - dg.evaluate_derivative(c_h, e, s);
            l2 += w * ev * ev;
            h1 += w * ed * ed;
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

std::vector<double> convergence_rates(const std::vector<double>& h, const std::vector<double>& errors)
{
    if (h.size() != errors.size()) throw DomainError("convergence_rates: length mismatch");
    std::vector<double> r;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (!(h[i] < h[i - 1])) throw ConfigError("convergence levels must be strictly refined");
        r.push_back(std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Parallel fan-out over independent levels

int worker_count()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("SOLVER_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

namespace {

template <class F>
void parallel_for(int count, F&& fn)
{
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void check_levels(const std::vector<int>& levels)
{
    if (levels.empty()) throw ConfigError("at least one mesh level is required");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1]) throw ConfigError("mesh levels must be strictly increasing");
}

} // namespace

ConvergenceReport convergence_study(const std::vector<int>& levels, const StudyParams& params,
                                    const std::function<void(const CoupledSystem&, const CoupledState&)>& on_level)
{
    check_levels(levels);
    const ManufacturedSolution m;
    const auto check = check_manufactured_sources(m);
    if (!check.passed) {
        std::ostringstream msg;
        msg << "manufactured source check failed (3D residual " << check.max_residual_3d << ", 1D residual "
            << check.max_residual_1d << ")";
        throw CheckFailure(msg.str());
    }

    ConvergenceReport rep;
    rep.levels.resize(levels.size());
    std::mutex callback_mutex;
    parallel_for(static_cast<int>(levels.size()), [&](int i) {
        const int n = levels[i];
        auto problem = m.problem(params.final_time, params.wall_source);
        Discretization disc;
        disc.cells = n;
        disc.elements = n;
        disc.degree = params.degree;
        disc.dg = params.dg;
        disc.tau = params.tau_factor / n;
        disc.n_circ = params.n_circ;
        const CoupledSystem system(std::move(problem), disc);
        const auto result = run(system);
        const double T = result.state.t;

        auto& lvl = rep.levels[i];
        lvl.n = n;
        lvl.h = 1.0 / n;
        lvl.err3d = error_norms_3d(
            system.fem(), result.state.c, [&](const Vec3& x) { return m.c(x, T); },
            [&](const Vec3& x) { return m.grad_c(x, T); });
        lvl.err1d = error_norms_1d(
            system.dg(), result.state.c_hat, [&](double s) { return m.c_hat(s - 0.5, T); },
            [&](double s) { return m.c_hat_dz(s - 0.5, T); });
        lvl.max_residual = result.report.max_residual;
        lvl.wall_seconds = result.report.wall_seconds;
        if (on_level) {
            std::lock_guard lock(callback_mutex);
            on_level(system, result.state);
        }
    });

    std::vector<double> h, g3, l3, g1, l1;
    for (const auto& l : rep.levels) {
        h.push_back(l.h);
        g3.push_back(l.err3d.grad);
        l3.push_back(l.err3d.l2);
        g1.push_back(l.err1d.grad);
        l1.push_back(l.err1d.l2);
        rep.max_residual = std::max(rep.max_residual, l.max_residual);
    }
    rep.grad3d_rates = convergence_rates(h, g3);
    rep.l2_3d_rates = convergence_rates(h, l3);
    rep.grad1d_rates = convergence_rates(h, g1);
    rep.l2_1d_rates = convergence_rates(h, l1);
    return rep;
}

// ---------------------------------------------------------------------------
// Diagonal vessel self-convergence

TransportProblem diagonal_problem(int case_id, double final_time)
{
    if (case_id < 1 || case_id > 3) throw ConfigError("diagonal case must be 1, 2 or 3");
    const Vec3 p0{-0.4, -0.4, -0.4}, p1{0.4, 0.4, 0.4};
    const double L = norm(p1 - p0);
    const auto radius = case_id == 1 ? RadiusProfile::constant(0.05) : RadiusProfile::tanh_ramp(0.05, 0.08, 8.0);
    const auto gamma = case_id == 3 ? PermeabilityProfile::piecewise({{0.0, L / 3.0, 0.0},
                                                                      {L / 3.0, 2.0 * L / 3.0, 0.05},
                                                                      {2.0 * L / 3.0, L, 0.1}})
                                    : PermeabilityProfile::constant(0.1);
    TransportProblem p{.geometry = VesselGeometry(p0, p1, radius, gamma)};
    const double u = 1.0 / std::sqrt(3.0);
    p.velocity = VectorField3::constant({u, u, u});
    p.velocity_hat = 1.0;
    p.inflow = [](double t) { return t <= 0.1 + 1e-12 ? 5.0 : 0.0; };
    p.final_time = final_time;
    return p;
}

int diagonal_elements(double length, int n) { return static_cast<int>(std::ceil(length * n - 1e-9)); }

Discretization diagonal_discretization(const TransportProblem& problem, int n, const StudyParams& params)
{
    Discretization d;
    d.cells = n;
    d.elements = diagonal_elements(problem.geometry.length(), n);
    d.degree = params.degree;
    d.dg = params.dg;
    d.tau = params.tau_factor / n;
    d.n_circ = params.n_circ;
    return d;
}

double l2_difference_3d(const CoupledSystem& coarse, std::span<const double> c, const CoupledSystem& fine,
                        std::span<const double> c_fine)
{
    const auto& mesh = coarse.mesh();
    const auto& rule = tet_quadrature(4);
    const std::vector<double> fine_values(c_fine.begin(), c_fine.end());
    double sum = 0.0;
    for (int k = 0; k < mesh.tet_count(); ++k) {
        const auto& tv = mesh.tet(k);
        const double scale = 6.0 * mesh.volume(k);
        for (const auto& q : rule) {
            double v = 0.0;
            for (int i = 0; i < 4; ++i) v += q.bary[i] * c[tv[i]];
            const double e = v - fine.fem().evaluate(fine_values, mesh.point(k, q.bary));
            sum += q.weight * scale * e * e;
        }
    }
    return std::sqrt(sum);
}

double l2_difference_1d(const DgSpace& coarse, std::span<const double> c, const DgSpace& fine,
                        std::span<const double> c_fine)
{
    // integrate on the common refinement so both fields are polynomial per piece
    std::vector<double> breaks = coarse.partition().nodes();
    breaks.insert(breaks.end(), fine.partition().nodes().begin(), fine.partition().nodes().end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                 breaks.end());
    const auto rule = gauss_legendre(std::max(coarse.degree(), fine.degree()) + 2);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], h = breaks[i + 1] - a;
        const int ec = coarse.partition().element_of(a + 0.5 * h);
        const int ef = fine.partition().element_of(a + 0.5 * h);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = a + 0.5 * h * (rule.points[q] + 1.0);
            const double e = coarse.evaluate(c, ec, s) - fine.evaluate(c_fine, ef, s);
            sum += 0.5 * h * rule.weights[q] * e * e;
        }
    }
    return std::sqrt(sum);
}

SelfConvergenceReport self_convergence(int case_id, const std::vector<int>& coarse_levels, int fine_n,
                                       const StudyParams& params,
                                       const std::function<void(const CoupledSystem&, const CoupledState&)>& on_fine)
{
    check_levels(coarse_levels);
    if (fine_n < coarse_levels.back()) throw ConfigError("fine level must not be coarser than the coarse levels");

    SelfConvergenceReport rep;
    rep.case_id = case_id;
    rep.fine_n = fine_n;

    auto fine_problem = diagonal_problem(case_id, params.final_time);
    const auto fine_disc = diagonal_discretization(fine_problem, fine_n, params);
    const CoupledSystem fine(std::move(fine_problem), fine_disc);
    const auto fine_result = run(fine);
    rep.fine_vessel_mass = fine.vessel_mass(fine_result.state);
    rep.max_residual = fine_result.report.max_residual;
    if (on_fine) on_fine(fine, fine_result.state);

    const double fine_norm3 = std::sqrt(fine.mass3d().bilinear(fine_result.state.c, fine_result.state.c));
    double fine_norm1 = 0.0;
    {
        const std::vector<double> zero(fine.dg_dofs(), 0.0);
        fine_norm1 = l2_difference_1d(fine.dg(), fine_result.state.c_hat, fine.dg(), zero);
    }

    rep.levels.resize(coarse_levels.size());
    parallel_for(static_cast<int>(coarse_levels.size()), [&](int i) {
        const int n = coarse_levels[i];
        auto problem = diagonal_problem(case_id, params.final_time);
        const auto disc = diagonal_discretization(problem, n, params);
        const CoupledSystem coarse(std::move(problem), disc);
        const auto res = run(coarse);
        auto& lvl = rep.levels[i];
        lvl.n = n;
        lvl.h = 1.0 / n;
        lvl.err3d = l2_difference_3d(coarse, res.state.c, fine, fine_result.state.c);
        lvl.err1d = l2_difference_1d(coarse.dg(), res.state.c_hat, fine.dg(), fine_result.state.c_hat);
        lvl.rel3d = fine_norm3 > 0.0 ? lvl.err3d / fine_norm3 : 0.0;
        lvl.rel1d = fine_norm1 > 0.0 ? lvl.err1d / fine_norm1 : 0.0;
        lvl.vessel_mass = coarse.vessel_mass(res.state);
        lvl.max_residual = res.report.max_residual;
    });

    std::vector<double> h, e3, e1;
    for (const auto& l : rep.levels) {
        h.push_back(l.h);
        e3.push_back(l.err3d);
        e1.push_back(l.err1d);
        rep.max_residual = std::max(rep.max_residual, l.max_residual);
    }
    rep.rate3d = convergence_rates(h, e3);
    rep.rate1d = convergence_rates(h, e1);
    return rep;
}

// ---------------------------------------------------------------------------
// Acceptance bands

const std::vector<ReferenceErrors>& manufactured_reference()
{
    static const std::vector<ReferenceErrors> table = {
        {4, 2.5e-1, 1.9e-2, 5.0e-1, 4.1e-2},  {8, 1.4e-1, 5.4e-3, 2.5e-1, 2.3e-2},
        {16, 9.1e-2, 1.7e-3, 1.3e-1, 1.3e-2}, {32, 5.6e-2, 5.2e-4, 6.3e-2, 6.2e-3},
        {64, 3.4e-2, 1.4e-4, 3.1e-2, 2.3e-3},
    };
    return table;
}

namespace {

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

BandCheck within_factor(const std::string& name, double value, double ref, double factor)
{
    BandCheck c{name, value <= factor * ref && value >= ref / factor, {}};
    c.detail = fmt(value) + " vs reference " + fmt(ref) + " (factor " + fmt(value / ref) + ")";
    return c;
}

BandCheck in_range(const std::string& name, double value, double lo, double hi)
{
    std::ostringstream d;
    d.precision(3);
    d << value << " in [" << lo << ", " << hi << "]";
    return {name, value >= lo && value <= hi, d.str()};
}

} // namespace

std::vector<BandCheck> check_convergence_bands(const ConvergenceReport& report)
{
    std::vector<BandCheck> out;
    for (const auto& lvl : report.levels) {
        const auto& ref = manufactured_reference();
        const auto it = std::find_if(ref.begin(), ref.end(), [&](const ReferenceErrors& r) { return r.n == lvl.n; });
        if (it == ref.end()) continue;
        const std::string h = "h=1/" + std::to_string(lvl.n);
        out.push_back(within_factor("3D gradient error " + h, lvl.err3d.grad, it->grad3d, 2.0));
        out.push_back(within_factor("3D L2 error " + h, lvl.err3d.l2, it->l2_3d, 2.0));
        out.push_back(within_factor("1D broken gradient error " + h, lvl.err1d.grad, it->grad1d, 2.0));
        out.push_back(within_factor("1D L2 error " + h, lvl.err1d.l2, it->l2_1d, 2.0));
    }
    for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
        const std::string pair =
            "1/" + std::to_string(report.levels[i].n) + "->1/" + std::to_string(report.levels[i + 1].n);
        out.push_back(in_range("1D broken gradient rate " + pair, report.grad1d_rates[i], 0.84, 1.14));
        out.push_back(in_range("3D gradient rate " + pair, report.grad3d_rates[i], 0.5, 1.0));
        out.push_back(in_range("3D L2 rate " + pair, report.l2_3d_rates[i], 1.5, 1e300));
        if (report.levels[i + 1].n <= 16)
            out.push_back(in_range("1D L2 rate " + pair, report.l2_1d_rates[i], 0.7, 1e300));
    }
    return out;
}

std::vector<BandCheck> check_self_convergence_bands(const SelfConvergenceReport& report)
{
    std::vector<BandCheck> out;
    const std::string tag = "case " + std::to_string(report.case_id) + " ";
    for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
        const auto& a = report.levels[i];
        const auto& b = report.levels[i + 1];
        const std::string pair = "1/" + std::to_string(a.n) + "->1/" + std::to_string(b.n);
        out.push_back({tag + "3D error decreases " + pair, b.err3d < a.err3d, fmt(a.err3d) + " -> " + fmt(b.err3d)});
        out.push_back({tag + "1D error decreases " + pair, b.err1d < a.err1d, fmt(a.err1d) + " -> " + fmt(b.err1d)});
    }
    if (report.case_id == 1 && !report.rate3d.empty())
        out.push_back(in_range(tag + "finest-pair 3D rate", report.rate3d.back(), 1.0, 1e300));
    return out;
}

} // namespace mixdim
