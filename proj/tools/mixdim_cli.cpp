// Command-line front end: manufactured convergence study, diagonal-vessel
// self-convergence study, and a generic single run driven by a config file.

#include "mixdim/io.hpp"
#include "mixdim/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace mixdim;

namespace {

const std::vector<int> allowed_levels = {4, 8, 16, 32, 64};

struct Options {
    std::string command;
    std::vector<int> levels;
    int fine = 32;
    int case_id = 1;
    int degree = 1;
    int epsilon = 1;
    double sigma = 50.0;
    double tau_factor = 0.1;
    double final_time = 1.0;
    int n_circ = coupling::default_circle_points;
    bool wall_source = true;
    bool check = false;
    std::string out = ".";
    std::vector<double> snapshots;
};

std::optional<double> at(const std::vector<double>& v, std::size_t i)
{
    if (i < v.size()) return v[i];
    return std::nullopt;
}

void validate(const Options& o)
{
    if (o.levels.empty()) throw ConfigError("levels must not be empty");
    for (int n : o.levels)
        if (std::find(allowed_levels.begin(), allowed_levels.end(), n) == allowed_levels.end())
            throw ConfigError("level " + std::to_string(n) + " not in {4, 8, 16, 32, 64}");
    for (std::size_t i = 1; i < o.levels.size(); ++i)
        if (o.levels[i] <= o.levels[i - 1]) throw ConfigError("levels must be strictly increasing");
    if (o.degree < 1) throw ConfigError("degree must be at least 1");
    if (o.epsilon < -1 || o.epsilon > 1) throw ConfigError("epsilon must be -1, 0 or 1");
    if (!(o.sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(o.tau_factor > 0.0)) throw ConfigError("tau factor must be positive");
    if (!(o.final_time > 0.0)) throw ConfigError("final time must be positive");
    if (o.n_circ < 4) throw ConfigError("n_circ must be at least 4");
    if (o.command == "diagonal") {
        if (o.case_id < 1 || o.case_id > 3) throw ConfigError("case must be 1, 2 or 3");
        if (o.fine <= o.levels.back()) throw ConfigError("fine level must exceed every coarse level");
    }
}

StudyParams study_params(const Options& o)
{
    StudyParams p;
    p.degree = o.degree;
    p.dg = DgParams{o.epsilon, o.sigma, DgParams{}.sigma_min};
    p.n_circ = o.n_circ;
    p.final_time = o.final_time;
    p.tau_factor = o.tau_factor;
    p.wall_source = o.wall_source;
    return p;
}

std::string out_path(const Options& o, const std::string& name) { return (std::filesystem::path(o.out) / name).string(); }

void prepare_out(const Options& o)
{
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create output directory '" + o.out + "': " + ec.message());
}

std::string time_tag(double t)
{
    std::ostringstream s;
    s.precision(6);
    s << t;
    return s.str();
}

int report_bands(const std::vector<BandCheck>& checks)
{
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    return ok ? 0 : 4;
}

int cmd_manufactured(const Options& o)
{
    validate(o);
    prepare_out(o);
    const auto params = study_params(o);
    const int finest = o.levels.back();
    const ManufacturedSolution m;
    auto rep = convergence_study(o.levels, params, [&](const CoupledSystem& sys, const CoupledState& s) {
        if (sys.discretization().cells != finest) return;
        write_vtk_3d(sys.mesh(), s.c, out_path(o, "manufactured_3d_T.vtk"));
        write_vtk_1d(sys.problem().geometry, sys.dg(), s.c_hat, out_path(o, "manufactured_1d_T.vtk"));
    });

    std::vector<std::vector<std::optional<double>>> rows3, rows1;
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const auto& l = rep.levels[i];
        const auto prev = i == 0 ? std::size_t(-1) : i - 1;
        rows3.push_back({l.h, l.err3d.grad, at(rep.grad3d_rates, prev), l.err3d.l2, at(rep.l2_3d_rates, prev)});
        rows1.push_back({l.h, l.err1d.grad, at(rep.grad1d_rates, prev), l.err1d.l2, at(rep.l2_1d_rates, prev)});
        std::printf("n=%-3d grad3d=%.3e l2_3d=%.3e grad1d=%.3e l2_1d=%.3e residual=%.1e %.1fs\n", l.n,
                    l.err3d.grad, l.err3d.l2, l.err1d.grad, l.err1d.l2, l.max_residual, l.wall_seconds);
    }
    const std::vector<std::string> header = {"h", "grad_error", "grad_rate", "l2_error", "l2_rate"};
    write_csv(out_path(o, "table1_3d.csv"), header, rows3);
    write_csv(out_path(o, "table2_1d.csv"), header, rows1);
    std::printf("max residual %.2e\n", rep.max_residual);
    return o.check ? report_bands(check_convergence_bands(rep)) : 0;
}

int cmd_diagonal(const Options& o)
{
    validate(o);
    prepare_out(o);
    const auto params = study_params(o);
    const std::vector<double> snaps = o.snapshots.empty() ? std::vector<double>{0.0125, 0.5, 1.0} : o.snapshots;

    // Snapshots come from a separate run at the finest coarse level so that the
    // reference run stays a plain final-time solve.
    {
        auto problem = diagonal_problem(o.case_id, o.final_time);
        const auto disc = diagonal_discretization(problem, o.levels.back(), params);
        const CoupledSystem sys(std::move(problem), disc);
        run(sys, snaps, [&](int, double t, const CoupledState& s) {
            const std::string base = "case" + std::to_string(o.case_id) + "_t" + time_tag(t);
            write_vtk_3d(sys.mesh(), s.c, out_path(o, base + "_3d.vtk"));
            write_vtk_1d(sys.problem().geometry, sys.dg(), s.c_hat, out_path(o, base + "_1d.vtk"));
        });
    }

    const auto rep = self_convergence(o.case_id, o.levels, o.fine, params);
    std::vector<std::vector<std::optional<double>>> rows;
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const auto& l = rep.levels[i];
        const auto prev = i == 0 ? std::size_t(-1) : i - 1;
        rows.push_back({l.h, l.err3d, at(rep.rate3d, prev), l.err1d, at(rep.rate1d, prev), l.rel3d, l.rel1d});
        std::printf("n=%-3d err3d=%.3e err1d=%.3e rel3d=%.3e rel1d=%.3e vessel_mass=%.4e\n", l.n, l.err3d, l.err1d,
                    l.rel3d, l.rel1d, l.vessel_mass);
    }
    write_csv(out_path(o, "table3_case" + std::to_string(o.case_id) + ".csv"),
              {"h", "err3d", "rate3d", "err1d", "rate1d", "rel_err3d", "rel_err1d"}, rows);
    std::printf("reference n=%d vessel_mass=%.4e max residual %.2e\n", rep.fine_n, rep.fine_vessel_mass,
                rep.max_residual);
    return o.check ? report_bands(check_self_convergence_bands(rep)) : 0;
}

// ---------------------------------------------------------------------------
// Generic single run

const std::vector<std::string> run_keys = {
    "command", "p0", "p1", "radius", "radius_min", "radius_max", "radius_beta", "gamma", "kappa", "kappa_hat",
    "velocity", "velocity_hat", "inflow", "inflow_duration", "cells", "elements", "degree", "epsilon", "sigma",
    "tau", "final_time", "n_circ", "snapshots", "out"};

const std::vector<std::string> study_keys = {"command", "levels", "fine", "case", "degree", "epsilon",
                                             "sigma", "tau_factor", "final_time", "n_circ", "wall_source",
                                             "check", "out", "snapshots"};

int cmd_run_single(const ConfigFile& cfg)
{
    cfg.check_keys(run_keys);
    const auto get_or = [&](const std::string& key, double fallback) {
        return cfg.has(key) ? cfg.get_double(key) : fallback;
    };
    const auto get_int_or = [&](const std::string& key, int fallback) {
        return cfg.has(key) ? cfg.get_int(key) : fallback;
    };

    const Vec3 p0 = cfg.has("p0") ? cfg.get_vec3("p0") : Vec3{-0.4, -0.4, -0.4};
    const Vec3 p1 = cfg.has("p1") ? cfg.get_vec3("p1") : Vec3{0.4, 0.4, 0.4};
    const bool tapered = cfg.has("radius_min") || cfg.has("radius_max") || cfg.has("radius_beta");
    if (tapered && cfg.has("radius")) throw ConfigError("give either radius or radius_min/radius_max/radius_beta");
    const auto radius = tapered ? RadiusProfile::tanh_ramp(get_or("radius_min", 0.05), get_or("radius_max", 0.08),
                                                           get_or("radius_beta", 8.0))
                                : RadiusProfile::constant(get_or("radius", 0.05));
    const auto gamma = PermeabilityProfile::constant(get_or("gamma", 0.1));

    TransportProblem p{.geometry = VesselGeometry(p0, p1, radius, gamma)};
    const double kappa = get_or("kappa", 1.0), kappa_hat = get_or("kappa_hat", 1.0);
    p.kappa = ScalarField3::constant(kappa);
    p.kappa_hat = [kappa_hat](double) { return kappa_hat; };
    p.velocity = VectorField3::constant(cfg.has("velocity") ? cfg.get_vec3("velocity") : p.geometry.tangent());
    p.velocity_hat = get_or("velocity_hat", 1.0);
    const double c_in = get_or("inflow", 5.0), duration = get_or("inflow_duration", 0.1);
    p.inflow = [c_in, duration](double t) { return t <= duration + 1e-12 ? c_in : 0.0; };
    p.final_time = get_or("final_time", 1.0);

    Discretization d;
    d.cells = get_int_or("cells", 8);
    d.elements = get_int_or("elements", diagonal_elements(p.geometry.length(), d.cells));
    d.degree = get_int_or("degree", 1);
    d.dg = DgParams{get_int_or("epsilon", 1), get_or("sigma", 50.0), DgParams{}.sigma_min};
    d.tau = get_or("tau", Discretization::default_tau(p, d.cells));
    d.n_circ = get_int_or("n_circ", coupling::default_circle_points);
    if (d.cells < 2 || d.elements < 1 || d.degree < 1) throw ConfigError("cells >= 2, elements >= 1, degree >= 1");

    Options o;
    o.out = cfg.has("out") ? cfg.get("out") : ".";
    prepare_out(o);
    const auto snaps = cfg.has("snapshots") ? cfg.get_doubles("snapshots") : std::vector<double>{p.final_time};

    const CoupledSystem sys(std::move(p), d);
    for (const auto& w : sys.warnings()) std::cerr << "warning: " << w << '\n';
    const auto result = run(sys, snaps, [&](int, double t, const CoupledState& s) {
        write_vtk_3d(sys.mesh(), s.c, out_path(o, "run_t" + time_tag(t) + "_3d.vtk"));
        write_vtk_1d(sys.problem().geometry, sys.dg(), s.c_hat, out_path(o, "run_t" + time_tag(t) + "_1d.vtk"));
    });
    const auto& r = result.report;
    write_csv(out_path(o, "run_summary.csv"),
              {"steps", "max_residual", "final_energy", "vessel_mass", "wall_seconds"},
              {{double(r.steps), r.max_residual, r.energy.back(), sys.vessel_mass(result.state), r.wall_seconds}});
    std::printf("%d steps, max residual %.2e, final energy %.4e, vessel mass %.4e, %.1fs\n", r.steps,
                r.max_residual, r.energy.back(), sys.vessel_mass(result.state), r.wall_seconds);
    return 0;
}

Options options_from_config(const ConfigFile& cfg)
{
    cfg.check_keys(study_keys);
    Options o;
    o.command = cfg.get("command");
    o.levels = cfg.has("levels") ? cfg.get_ints("levels") : std::vector<int>{4, 8, 16};
    if (cfg.has("fine")) o.fine = cfg.get_int("fine");
    if (cfg.has("case")) o.case_id = cfg.get_int("case");
    if (cfg.has("degree")) o.degree = cfg.get_int("degree");
    if (cfg.has("epsilon")) o.epsilon = cfg.get_int("epsilon");
    if (cfg.has("sigma")) o.sigma = cfg.get_double("sigma");
    if (cfg.has("tau_factor")) o.tau_factor = cfg.get_double("tau_factor");
    if (cfg.has("final_time")) o.final_time = cfg.get_double("final_time");
    if (cfg.has("n_circ")) o.n_circ = cfg.get_int("n_circ");
    if (cfg.has("wall_source")) o.wall_source = cfg.get_bool("wall_source");
    if (cfg.has("check")) o.check = cfg.get_bool("check");
    if (cfg.has("out")) o.out = cfg.get("out");
    if (cfg.has("snapshots")) o.snapshots = cfg.get_doubles("snapshots");
    return o;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides)
{
    auto cfg = ConfigFile::load(path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' must be key=value");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto command = cfg.get("command");
    if (command == "run") return cmd_run_single(cfg);
    auto o = options_from_config(cfg);
    if (command == "manufactured") return cmd_manufactured(o);
    if (command == "diagonal") return cmd_diagonal(o);
    throw ConfigError("unknown command '" + command + "' (manufactured, diagonal, run)");
}

void add_study_options(CLI::App* app, Options& o)
{
    app->add_option("--levels", o.levels, "mesh levels n (h = 1/n), subset of 4,8,16,32,64")->delimiter(',');
    app->add_option("--degree", o.degree, "DG polynomial degree on the vessel");
    app->add_option("--epsilon", o.epsilon, "IPDG symmetry parameter (-1, 0, 1)");
    app->add_option("--sigma", o.sigma, "IPDG penalty parameter");
    app->add_option("--tau-factor", o.tau_factor, "time step as a multiple of h");
    app->add_option("--final-time", o.final_time, "final time T");
    app->add_option("--n-circ", o.n_circ, "points on each cross-section circle");
    app->add_option("--out", o.out, "output directory");
    app->add_flag("--check", o.check, "evaluate the acceptance bands; exit 4 if any fails");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coupled 3D-1D solute transport solver"};
    app.require_subcommand(1);

    Options man;
    man.command = "manufactured";
    man.levels = {4, 8, 16};
    auto* m = app.add_subcommand("manufactured", "convergence study against the manufactured solution");
    add_study_options(m, man);
    m->add_option("--wall-source", man.wall_source, "include the wall line source (true/false)");

    Options diag;
    diag.command = "diagonal";
    diag.levels = {4, 8, 16};
    auto* d = app.add_subcommand("diagonal", "self-convergence study for the diagonal vessel");
    add_study_options(d, diag);
    d->add_option("--case", diag.case_id, "1 constant radius, 2 tapered radius, 3 tapered radius + piecewise gamma");
    d->add_option("--fine", diag.fine, "reference level n*");
    d->add_option("--snapshots", diag.snapshots, "VTK snapshot times")->delimiter(',');

    std::string config;
    std::vector<std::string> overrides;
    auto* r = app.add_subcommand("run", "run the command described by a key = value config file");
    r->add_option("--config", config, "config file")->required();
    r->add_option("--set", overrides, "override a config entry, key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (m->parsed()) return cmd_manufactured(man);
        if (d->parsed()) return cmd_diagonal(diag);
        return cmd_run(config, overrides);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CoefficientError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CheckFailure& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
