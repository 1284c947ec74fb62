#include "chns/config.hpp"
#include "chns/elliptic.hpp"
#include "chns/errors.hpp"
#include "chns/experiments.hpp"
#include "chns/io.hpp"
#include "chns/run.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace chns;

namespace {

enum Exit { ok = 0, usage = 1, config_error = 2, solver_abort = 3, verify_failure = 4 };

fs::path pick_out(const std::string& cli_out, const RunConfig& cfg)
{
    if (!cli_out.empty())
        return cli_out;
    if (!cfg.output.dir.empty())
        return cfg.output.dir;
    return default_output_dir();
}

void write_state(const fs::path& dir, const SimState& s, const OutputSettings& out, const std::string& tag)
{
    const std::string ext = out.format == SnapshotEncoding::binary ? ".bin" : ".txt";
    write_snapshot(dir / ("phi" + tag + ext), s.phi, s.t, "phi", out.format);
    write_snapshot(dir / ("sigma" + tag + ext), s.sigma, s.t, "sigma", out.format);
    write_snapshot(dir / ("p" + tag + ext), s.p, s.t, "p", out.format);
    if (out.heatmap)
        write_heatmap_ppm(dir / ("phi" + tag + ".ppm"), s.phi);
}

std::string step_tag(long n)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06ld", n);
    return buf;
}

RunResult simulate(const RunConfig& cfg, const SimState& init, const RunHooks& hooks)
{
    Stepper st(cfg.grid(), cfg.physics, cfg.stepper);
    if (cfg.experiment.t_end > 0.0)
        return run(st, init, cfg.experiment.t_end, hooks);
    return run_steps(st, init, cfg.experiment.steps, hooks);
}

int cmd_run(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed)
{
    RunConfig cfg = parse_and_validate(config);
    if (seed) {
        cfg.experiment.seed = *seed;
        validate(cfg);
    }
    const fs::path dir = pick_out(out, cfg);
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "config.effective");
        os << emit_config(cfg);
    }

    const SimState init = initial_state(cfg);
    std::ofstream csv(dir / "series.csv");
    write_csv_header(csv);
    RunHooks hooks;
    hooks.record_every = cfg.output.csv_every;
    hooks.on_record = [&](const SimState&, const DiagnosticsRecord& r) { write_csv_row(csv, r); };
    hooks.output_every = cfg.output.snapshot_every;
    if (cfg.output.snapshot_every > 0)
        hooks.on_output = [&](const SimState& s) { write_state(dir, s, cfg.output, step_tag(s.step_index)); };

    const RunResult r = simulate(cfg, init, hooks);
    write_state(dir, r.final_state, cfg.output, "_final");
    std::cout << "run finished: t = " << format_double(r.final_state.t) << ", steps = " << r.final_state.step_index
              << ", output in " << dir.string() << '\n';
    return ok;
}

int cmd_verify(const std::string& name, const std::string& out, std::uint64_t seed)
{
    ExperimentOptions opts;
    opts.out_dir = out.empty() ? fs::path(default_output_dir()) : fs::path(out);
    opts.seed = seed;
    opts.log = &std::cerr;
    fs::create_directories(opts.out_dir);

    std::vector<ExperimentReport> reps;
    if (name == "all")
        reps = run_all_experiments(opts);
    else
        reps.push_back(run_experiment(name, opts));

    bool all = true;
    for (const auto& r : reps) {
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << '\n';
        all = all && r.passed();
    }
    return all ? ok : verify_failure;
}

int cmd_elliptic(const std::string& input, const std::string& out, double a, double b, double theta, double theta0,
                 double tol)
{
    const Snapshot snap = read_snapshot(input);
    EllipticProblem prob{a, b, Potential::logarithmic(theta, theta0), snap.field, tol};
    const fs::path dir = out.empty() ? fs::path(default_output_dir()) : fs::path(out);
    fs::create_directories(dir);
    const EllipticSolution sol = solve_singular_neumann(prob);
    write_snapshot(dir / "u.txt", sol.u, snap.time, "u");
    std::ofstream os(dir / "elliptic_report.txt");
    os << "{\n  \"newton_iters\": " << sol.newton_iters << ",\n  \"linear_iters\": " << sol.linear_iters
       << ",\n  \"residual\": " << format_double(sol.final_residual)
       << ",\n  \"roundoff_floor\": " << format_double(sol.roundoff_floor)
       << ",\n  \"margin\": " << format_double(sol.margin) << "\n}\n";
    std::cout << "elliptic solve: " << sol.newton_iters << " Newton iterations, residual "
              << format_double(sol.final_residual) << ", margin " << format_double(sol.margin) << '\n';
    return ok;
}

// Restriction of a fine state to the grid with half the cells per direction:
// cell averages for scalars, flux averages for face velocities.
SimState restrict_state(const SimState& f, const Grid& gc)
{
    SimState c(gc);
    auto avg = [&](const ScalarField& s, ScalarField& d) {
        for (int j = 0; j < gc.ny(); ++j)
            for (int i = 0; i < gc.nx(); ++i)
                d(i, j) = 0.25 * (s(2 * i, 2 * j) + s(2 * i + 1, 2 * j) + s(2 * i, 2 * j + 1) + s(2 * i + 1, 2 * j + 1));
    };
    avg(f.phi, c.phi);
    avg(f.sigma, c.sigma);
    for (int j = 0; j < gc.ny(); ++j)
        for (int i = 0; i <= gc.nx(); ++i)
            c.v.u(i, j) = 0.5 * (f.v.u(2 * i, 2 * j) + f.v.u(2 * i, 2 * j + 1));
    for (int j = 0; j <= gc.ny(); ++j)
        for (int i = 0; i < gc.nx(); ++i)
            c.v.w(i, j) = 0.5 * (f.v.w(2 * i, 2 * j) + f.v.w(2 * i + 1, 2 * j));
    return c;
}

int cmd_convergence(const std::string& config, const std::string& out, int levels, std::optional<std::uint64_t> seed)
{
    RunConfig base = parse_and_validate(config);
    if (seed)
        base.experiment.seed = *seed;
    if (levels < 2)
        throw ConfigError("--levels must be at least 2");
    const fs::path dir = pick_out(out, base);
    fs::create_directories(dir);
    const double t_end =
        base.experiment.t_end > 0.0 ? base.experiment.t_end : base.stepper.dt * static_cast<double>(base.experiment.steps);

    // Each level refines the grid by 2 and the step by 4. Initial data are
    // sampled on the coarsest grid and prolonged piecewise constantly, so
    // every level starts from the same function.
    const SimState coarse0 = initial_state(base);
    std::vector<SimState> finals;
    for (int l = 0; l < levels; ++l) {
        RunConfig cfg = base;
        const int r = 1 << l;
        cfg.nx = base.nx * r;
        cfg.ny = base.ny * r;
        cfg.stepper.dt = base.stepper.dt / (r * r);
        cfg.stepper.dt_max.reset();
        cfg.stepper.adapt_dt = false;
        cfg.experiment.t_end = t_end;
        const Grid g = cfg.grid();
        ScalarField phi(g), sigma(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                phi(i, j) = coarse0.phi(i / r, j / r);
                sigma(i, j) = coarse0.sigma(i / r, j / r);
            }
        MacVelocity v(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i <= g.nx(); ++i)
                v.u(i, j) = i % r == 0 ? coarse0.v.u(i / r, j / r) : 0.0;
        for (int j = 0; j <= g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                v.w(i, j) = j % r == 0 ? coarse0.v.w(i / r, j / r) : 0.0;
        if (r > 1 && linf_norm(coarse0.v) > 0.0)
            throw ConfigError("convergence: initial velocity must be zero (prolongation is not divergence-free)");
        std::cerr << "[convergence] level " << l << ": " << cfg.nx << "x" << cfg.ny << ", dt "
                  << format_double(cfg.stepper.dt) << '\n';
        finals.push_back(simulate(cfg, make_state(cfg.physics, v, phi, sigma), {}).final_state);
    }

    std::ofstream os(dir / "convergence.csv");
    os << "level,nx,ny,phi_diff,sigma_diff,velocity_diff,phi_order,sigma_order,velocity_order\n";
    std::vector<std::array<double, 3>> diffs;
    for (int l = 1; l < levels; ++l) {
        const SimState& coarse = finals[static_cast<std::size_t>(l - 1)];
        const SimState fine = restrict_state(finals[static_cast<std::size_t>(l)], coarse.grid());
        const FaceField dv = coarse.v - fine.v;
        diffs.push_back({l2_norm(coarse.phi - fine.phi), l2_norm(coarse.sigma - fine.sigma),
                         std::sqrt(face_inner_product(dv, dv))});
        const auto& d = diffs.back();
        os << l << ',' << coarse.grid().nx() * 2 << ',' << coarse.grid().ny() * 2;
        for (double x : d)
            os << ',' << format_double(x);
        for (int k = 0; k < 3; ++k)
            os << ',' << (diffs.size() > 1 ? format_double(observed_order(diffs[diffs.size() - 2][k], d[k])) : "");
        os << '\n';
    }
    std::cout << "convergence table written to " << (dir / "convergence.csv").string() << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structure-preserving Navier-Stokes-Cahn-Hilliard-nutrient simulator"};
    app.require_subcommand(1);
    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "override the random seed")->expected(1);

    std::string config, out, name, input;
    int levels = 3;
    double a = 1.0, b = 1.0, theta = 1.0, theta0 = 1.0, tol = 1e-10;

    auto* run_cmd = app.add_subcommand("run", "run a simulation from a config file");
    run_cmd->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out, "output directory");
    run_cmd->add_option("--seed", seed, "override the random seed");

    std::string verify_names = "all | ";
    for (const auto& e : experiment_registry())
        verify_names += e.name + (&e == &experiment_registry().back() ? "" : " | ");
    auto* verify_cmd = app.add_subcommand("verify", "run a verification experiment (" + verify_names + ")");
    verify_cmd->add_option("name", name, "experiment name or 'all'")->required();
    verify_cmd->add_option("--out", out, "output directory");
    verify_cmd->add_option("--seed", seed, "random seed");

    auto* ell_cmd = app.add_subcommand("elliptic-solve", "solve -B lap u + A Psi0'(u) = f from a snapshot of f");
    ell_cmd->add_option("--input", input, "snapshot file holding f")->required()->check(CLI::ExistingFile);
    ell_cmd->add_option("--out", out, "output directory");
    ell_cmd->add_option("--A", a, "coefficient A")->capture_default_str();
    ell_cmd->add_option("--B", b, "coefficient B")->capture_default_str();
    ell_cmd->add_option("--theta", theta, "temperature theta")->capture_default_str();
    ell_cmd->add_option("--theta0", theta0, "critical temperature theta0")->capture_default_str();
    ell_cmd->add_option("--tol", tol, "l2 residual tolerance")->capture_default_str();

    auto* conv_cmd = app.add_subcommand("convergence", "self-convergence table under refinement of a config");
    conv_cmd->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    conv_cmd->add_option("--levels", levels, "number of refinement levels")->capture_default_str();
    conv_cmd->add_option("--out", out, "output directory");
    conv_cmd->add_option("--seed", seed, "override the random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run_cmd)
            return cmd_run(config, out, seed);
        if (*verify_cmd)
            return cmd_verify(name, out, seed.value_or(1));
        if (*ell_cmd)
            return cmd_elliptic(input, out, a, b, theta, theta0, tol);
        if (*conv_cmd)
            return cmd_convergence(config, out, levels, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const SolverError& e) {
        std::cerr << "solver abort: " << e.what() << '\n';
        return solver_abort;
    } catch (const DomainError& e) {
        std::cerr << "solver abort: " << e.what() << '\n';
        return solver_abort;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}
