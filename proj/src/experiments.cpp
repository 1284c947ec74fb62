#include "chns/experiments.hpp"

#include "chns/elliptic.hpp"
#include "chns/errors.hpp"
#include "chns/initial.hpp"
#include "chns/io.hpp"
#include "chns/manufactured.hpp"
#include "chns/run.hpp"
#include "chns/sparse_ops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace chns {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

class Ctx {
public:
    Ctx(const std::string& name, const ExperimentOptions& o) : opts(o), start(std::chrono::steady_clock::now())
    {
        rep.name = name;
    }

    void log(const std::string& msg) const
    {
        if (!opts.log)
            return;
        const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%7.1fs ", el);
        *opts.log << "[" << rep.name << "] " << buf << msg << std::endl;
    }

    void check(const std::string& name, const std::string& property, double measured, const std::string& rel,
               double threshold)
    {
        bool ok = false;
        if (std::isfinite(measured) || std::isinf(measured)) {
            if (rel == "<=")
                ok = measured <= threshold;
            else if (rel == ">=")
                ok = measured >= threshold;
            else if (rel == "<")
                ok = measured < threshold;
            else if (rel == ">")
                ok = measured > threshold;
        }
        rep.checks.push_back(Check{name, property, measured, threshold, rel, ok});
        log((ok ? "PASS " : "FAIL ") + name + " = " + format_double(measured) + " " + rel + " " +
            format_double(threshold));
    }

    void record(const std::string& name, const std::string& property, double value)
    {
        rep.checks.push_back(Check{name, property, value, 0.0, "record", true});
        log("     " + name + " = " + format_double(value));
    }

    void note(const std::string& s) { rep.notes.push_back(s); }

    void track(const std::vector<DiagnosticsRecord>& series)
    {
        for (const auto& r : series)
            rep.max_div = std::max(rep.max_div, r.div_linf);
    }

    void write_series(const std::string& file, const std::vector<DiagnosticsRecord>& series) const
    {
        std::ofstream os(opts.out_dir / file);
        write_csv_header(os);
        for (const auto& r : series)
            write_csv_row(os, r);
    }

    /// Fixed-dt run; records incompressibility and optionally writes the series.
    RunResult simulate(const Grid& g, const PhysParams& p, const StepperConfig& c, const SimState& init, long steps,
                       const std::string& series_file = {}, const RunHooks& hooks = {},
                       const ExternalForcing* forcing = nullptr, std::int64_t* clamps = nullptr)
    {
        Stepper st(g, p, c);
        if (forcing)
            st.set_forcing(*forcing);
        RunResult r = run_steps(st, init, steps, hooks);
        track(r.series);
        if (!series_file.empty())
            write_series(series_file, r.series);
        if (clamps)
            *clamps = st.clamp_events();
        return r;
    }

    ExperimentOptions opts;
    ExperimentReport rep;
    std::chrono::steady_clock::time_point start;
};

void write_table(const fs::path& path, const std::string& header, const std::vector<std::vector<double>>& rows)
{
    std::ofstream os(path);
    os << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            os << (k ? "," : "") << format_double(row[k]);
        os << '\n';
    }
}

StepperConfig fixed_dt(double dt)
{
    StepperConfig c;
    c.dt = dt;
    return c;
}

SourceSpec gaussian_source(double amplitude, double decay)
{
    SourceSpec s;
    s.kind = SourceSpec::Kind::gaussian_bump;
    s.amplitude = amplitude;
    s.x0 = 0.3;
    s.y0 = 0.6;
    s.width = 0.1;
    s.decay = decay;
    return s;
}

double h1_squared(const ScalarField& f)
{
    const FaceField gf = gradient(f);
    const double l2 = l2_norm(f);
    return l2 * l2 + face_inner_product(gf, gf);
}

std::string tag(double x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

bool ExperimentReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ExperimentReport::find(const std::string& check_name) const
{
    for (const auto& c : checks)
        if (c.name == check_name)
            return &c;
    return nullptr;
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

// ---------------------------------------------------------------------------

ExperimentReport exp_operators(const ExperimentOptions& opts)
{
    Ctx ctx("operators", opts);
    const Grid g(64, 48, 1.0, 0.75);
    std::mt19937_64 rng(opts.seed);
    auto rnd = [&] { return 2.0 * uniform01(rng) - 1.0; };

    ScalarField f(g), q(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = rnd();
        q[k] = rnd();
    }
    FaceField v(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            v.u(i, j) = rnd();
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            v.w(i, j) = rnd();

    auto conservation = [&](const ScalarField& out) {
        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k) {
            sum += out[k];
            abs_sum += std::abs(out[k]);
        }
        return std::abs(sum) / abs_sum;
    };
    ctx.check("laplacian_sum", "area-weighted sum of the Neumann Laplacian vanishes", conservation(laplacian_neumann(f)),
              "<=", 1e-13);
    ctx.check("advection_sum_centered", "area-weighted sum of centered conservative advection vanishes",
              conservation(advect_conservative(v, f, FaceInterpolation::centered)), "<=", 1e-13);
    ctx.check("advection_sum_upwind", "area-weighted sum of upwind conservative advection vanishes",
              conservation(advect_conservative(v, f, FaceInterpolation::upwind)), "<=", 1e-13);

    const ScalarField lf = laplacian_neumann(f), lq = laplacian_neumann(q);
    const double sym = std::abs(inner_product(lf, q) - inner_product(f, lq)) /
                       (l2_norm(lf) * l2_norm(q) + l2_norm(f) * l2_norm(lq));
    ctx.check("laplacian_self_adjoint", "<lap f, q> = <f, lap q>", sym, "<=", 1e-12);

    const double dual = std::abs(face_inner_product(gradient(f), v) + inner_product(f, divergence(v))) /
                        (std::sqrt(face_inner_product(gradient(f), gradient(f)) * face_inner_product(v, v)) +
                         l2_norm(f) * l2_norm(divergence(v)));
    ctx.check("gradient_divergence_duality", "<grad f, v> = -<f, div v> for zero normal flux", dual, "<=", 1e-12);

    // Viscous operator: symmetric, and its quadratic form is the dissipation.
    ScalarField eta(g);
    for (std::size_t k = 0; k < eta.size(); ++k)
        eta[k] = 1.0 + 0.5 * uniform01(rng);
    const VelocityDofs dofs(g);
    const SparseMatrix k_mat = viscous_matrix(dofs, eta);
    const Vector x = dofs.gather(v);
    const double asym = (SparseMatrix(k_mat.transpose()) - k_mat).norm() / k_mat.norm();
    ctx.check("viscous_symmetric", "viscous matrix is symmetric", asym, "<=", 1e-14);
    const double quad = x.dot(k_mat * x) * g.cell_area();
    const double diss = viscous_dissipation(v, eta);
    ctx.check("viscous_energy_identity", "v^T K v |cell| equals the viscous dissipation",
              std::abs(quad - diss) / diss, "<=", 1e-12);

    // Incompressibility along a coupled run with an initial vortex.
    const Grid gs(48, 48);
    PhysParams p;
    p.chi = 0.1;
    p.eta1 = 1.0;
    p.eta2 = 0.2;
    const SimState s0 = make_state(p, discrete_vortex(gs, 0.2), spinodal_phase(gs, 0.0, 0.05, opts.seed),
                                   ScalarField(gs, 0.5));
    StepperConfig c = fixed_dt(2e-3);
    const double tol = c.projection_tol;
    RunResult r = ctx.simulate(gs, p, c, s0, 30, "series_incompressibility.csv");
    double worst = 0.0;
    for (const auto& rec : r.series)
        worst = std::max(worst, rec.div_linf);
    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", worst, "<=", tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_mass_law(const ExperimentOptions& opts)
{
    Ctx ctx("mass_law", opts);
    const Grid g(64, 64);
    const double dt = 0.005;
    const long steps = 200;
    const double c0 = -0.1, m0_target = 0.1;
    const double t_order = 0.2;

    PhysParams base;
    base.chi = 0.1;
    base.c0 = c0;
    base.source = gaussian_source(2.0, 0.5);
    const ScalarField phi0 = spinodal_phase(g, m0_target, 0.05, opts.seed);
    const SimState s0 = make_state(base, discrete_vortex(g, 0.05), phi0, ScalarField(g, 0.5));
    const double m0 = mean(s0.phi);

    std::vector<std::vector<double>> order_rows;
    for (double alpha : {0.0, 0.5, 2.0}) {
        PhysParams p = base;
        p.alpha = alpha;
        ctx.log("alpha = " + tag(alpha) + ": " + std::to_string(steps) + " steps");
        RunResult r = ctx.simulate(g, p, fixed_dt(dt), s0, steps, "series_alpha_" + tag(alpha) + ".csv");

        double rec_err = 0.0, nut_err = 0.0, drift = 0.0;
        for (std::size_t n = 0; n + 1 < r.series.size(); ++n) {
            const auto& a = r.series[n];
            const auto& b = r.series[n + 1];
            const double dev = a.phi_mean - c0;
            rec_err = std::max(rec_err, std::abs((b.phi_mean - c0) * (1.0 + alpha * b.dt) - dev) / std::abs(dev));
            const double s_mean = mean(p.source.sample(g, b.t));
            nut_err = std::max(nut_err,
                               std::abs(b.sigma_mean - (a.sigma_mean + b.dt * s_mean)) / std::abs(b.sigma_mean));
            drift = std::max(drift, std::abs(b.phi_mean - m0));
        }
        ctx.check("recurrence_alpha_" + tag(alpha), "(mean_{n+1} - c0)(1 + alpha dt) = mean_n - c0, relative",
                  rec_err, "<=", 1e-10);
        ctx.check("nutrient_mean_alpha_" + tag(alpha), "mean sigma_{n+1} = mean sigma_n + dt mean S_{n+1}, relative",
                  nut_err, "<=", 1e-12);
        if (alpha == 0.0)
            ctx.check("conservation_alpha_0", "max |mean phi_n - mean phi_0| over 200 steps", drift, "<=", 1e-12);

        const MeanLawReport law = analytic_mean_law_check(r.series, p);
        ctx.record("continuous_error_alpha_" + tag(alpha), "|mean phi(T) - c0 - (m0 - c0) e^{-alpha T}|",
                   law.final_continuous_error);

        if (alpha > 0.0) {
            // Temporal order of the mean towards c0 + (m0 - c0) e^{-alpha t} at t = 0.2.
            const double exact = c0 + (m0 - c0) * std::exp(-alpha * t_order);
            const long fine_steps = std::lround(t_order / dt);
            std::vector<double> errs;
            for (double dtk : {4.0 * dt, 2.0 * dt}) {
                ctx.log("order run dt = " + tag(dtk));
                const RunResult rk = ctx.simulate(g, p, fixed_dt(dtk), s0, std::lround(t_order / dtk));
                errs.push_back(std::abs(rk.series.back().phi_mean - exact));
            }
            errs.push_back(std::abs(r.series[static_cast<std::size_t>(fine_steps)].phi_mean - exact));
            const double o1 = observed_order(errs[0], errs[1]);
            const double o2 = observed_order(errs[1], errs[2]);
            order_rows.push_back({alpha, 4.0 * dt, errs[0], 0.0});
            order_rows.push_back({alpha, 2.0 * dt, errs[1], o1});
            order_rows.push_back({alpha, dt, errs[2], o2});
            ctx.check("mean_order_alpha_" + tag(alpha), "temporal order of the mean towards the exponential law",
                      std::min(o1, o2), ">=", 0.9);
        }
    }
    write_table(ctx.opts.out_dir / "mean_order.csv", "alpha,dt,error,order", order_rows);
    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", ctx.rep.max_div, "<=",
              StepperConfig{}.projection_tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_energy_dissipation(const ExperimentOptions& opts)
{
    Ctx ctx("energy_dissipation", opts);
    const Grid g(64, 64);
    const double dt = 1e-3;
    const long steps = 500;

    PhysParams p;
    p.chi = 0.1;
    p.alpha = 0.0;
    p.consumption = 0.0;
    p.eta1 = 1.0;
    p.eta2 = 0.5;
    const SimState s0 = make_state(p, MacVelocity(g), spinodal_phase(g, 0.0, 0.05, opts.seed), ScalarField(g, 0.5));

    ctx.log("spinodal run: 500 steps");
    const RunResult r = ctx.simulate(g, p, fixed_dt(dt), s0, steps, "series.csv");

    double d_min = std::numeric_limits<double>::infinity();
    double rise = -std::numeric_limits<double>::infinity();
    double res_max = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < r.series.size(); ++n) {
        d_min = std::min(d_min, r.series[n].D);
        if (n > 0) {
            const double e0 = r.series[n - 1].E;
            rise = std::max(rise, (r.series[n].E - e0) / (1.0 + std::abs(e0)));
            res_max = std::max(res_max, r.series[n].energy_residual * r.series[n].dt / (1.0 + std::abs(e0)));
        }
    }
    ctx.check("dissipation_nonnegative", "min over steps of D", d_min, ">=", 0.0);
    ctx.check("energy_monotone", "max per-step (E_{n+1} - E_n)/(1 + |E_n|)", rise, "<=", 1e-8);
    ctx.check("residual_sign", "max per-step residual dt/(1 + |E_n|); the scheme only adds dissipation", res_max, "<=",
              1e-8);
    ctx.record("energy_initial", "E at t = 0", r.series.front().E);
    ctx.record("energy_final", "E at t = T", r.series.back().E);

    // Residual order: single steps of shrinking size from the final state.
    std::vector<std::vector<double>> rows;
    std::vector<double> res;
    for (double div : {4.0, 8.0, 16.0}) {
        const double dtk = dt / div;
        const RunResult rk = ctx.simulate(g, p, fixed_dt(dtk), r.final_state, 1);
        res.push_back(std::abs(rk.series.back().energy_residual));
        rows.push_back({dtk, rk.series.back().energy_residual, res.size() > 1 ? observed_order(res[res.size() - 2], res.back()) : 0.0});
    }
    write_table(ctx.opts.out_dir / "residual_order.csv", "dt,residual,order", rows);
    ctx.check("residual_order", "order of |energy-law residual| under dt halving",
              std::min(observed_order(res[0], res[1]), observed_order(res[1], res[2])), ">=", 0.9);

    // All-zero control: the zero state is a fixed point and the residual is exactly zero.
    {
        const SimState z = make_state(p, MacVelocity(g), ScalarField(g, 0.0), ScalarField(g, 0.0));
        const RunResult rz = ctx.simulate(g, p, fixed_dt(dt), z, 10);
        double worst = 0.0;
        for (const auto& rec : rz.series)
            worst = std::max(worst, std::abs(rec.energy_residual));
        ctx.check("zero_control_residual", "max |residual| on the all-zero state", worst, "<=", 0.0);
    }

    // Setting lambda = chi explicitly must reproduce the default series bit for bit.
    {
        const long n_cmp = 50;
        PhysParams pl = p;
        pl.lambda = p.chi;
        const RunResult ra = ctx.simulate(g, p, fixed_dt(dt), s0, n_cmp);
        const RunResult rb = ctx.simulate(g, pl, fixed_dt(dt), s0, n_cmp);
        double mismatches = 0.0;
        for (std::size_t n = 0; n < ra.series.size(); ++n) {
            std::ostringstream a, b;
            write_csv_row(a, ra.series[n]);
            write_csv_row(b, rb.series[n]);
            if (a.str() != b.str())
                mismatches += 1.0;
        }
        if (!(ra.final_state == rb.final_state))
            mismatches += 1.0;
        ctx.check("lambda_equals_chi_identical", "rows differing between lambda unset and lambda = chi", mismatches,
                  "<=", 0.0);
    }
    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", ctx.rep.max_div, "<=",
              StepperConfig{}.projection_tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_separation(const ExperimentOptions& opts)
{
    Ctx ctx("separation", opts);
    const Grid g(64, 64);
    const double dt = 0.005;
    const long steps = 200;

    PhysParams p;
    p.potential = Potential::logarithmic(0.5, 1.0);
    p.chi = 0.1;
    p.alpha = 0.5;
    p.c0 = 0.0;
    p.consumption = 0.0;
    p.source = gaussian_source(1.0, 1.0);

    struct Case {
        std::string name;
        ScalarField phi;
    };
    const std::vector<Case> cases = {{"spinodal", spinodal_phase(g, 0.0, 0.05, opts.seed)},
                                     {"stripe", stripe_phase(g, 0.5, 0.03)}};
    std::vector<std::vector<double>> rows;
    for (const auto& c : cases) {
        ctx.log(c.name + ": " + std::to_string(steps) + " steps");
        const SimState s0 = make_state(p, MacVelocity(g), c.phi, ScalarField(g, 0.5));
        std::int64_t clamps = 0;
        const RunResult r =
            ctx.simulate(g, p, fixed_dt(dt), s0, steps, "series_" + c.name + ".csv", {}, nullptr, &clamps);
        const double t_end = r.series.back().t;
        double min_all = 1.0, min_tail = 1.0;
        for (const auto& rec : r.series) {
            min_all = std::min(min_all, rec.margin);
            if (rec.t >= 0.5 * t_end)
                min_tail = std::min(min_tail, rec.margin);
        }
        ctx.check(c.name + "_min_margin", "min over [0, T] of 1 - ||phi||_inf", min_all, ">", 0.0);
        ctx.check(c.name + "_tail_margin", "min over [T/2, T] of 1 - ||phi||_inf", min_tail, ">", 0.0);
        ctx.check(c.name + "_clamp_events", "potential evaluations clamped at the barrier", static_cast<double>(clamps),
                  "<=", 0.0);
        rows.push_back({static_cast<double>(rows.size()), min_all, min_tail, static_cast<double>(clamps)});
    }
    write_table(ctx.opts.out_dir / "margins.csv", "case,min_margin,tail_min_margin,clamp_events", rows);

    // Constant phi = c0 is a fixed point; the margin stays 1 - |c0|.
    {
        PhysParams pc = p;
        pc.c0 = 0.3;
        pc.source = SourceSpec{};
        const SimState s0 = make_state(pc, MacVelocity(g), ScalarField(g, 0.3), ScalarField(g, 0.5));
        const RunResult r = ctx.simulate(g, pc, fixed_dt(dt), s0, 20);
        double dev = 0.0;
        for (const auto& rec : r.series)
            dev = std::max(dev, std::abs(rec.margin - 0.7));
        ctx.check("constant_state_margin", "max |margin - (1 - |c0|)| for phi = c0", dev, "<=", 1e-12);
    }

    // Regular-potential control, outside the separation claim: recorded only.
    {
        PhysParams pq = p;
        pq.potential = Potential::quartic();
        const SimState s0 = make_state(pq, MacVelocity(g), spinodal_phase(g, 0.0, 0.05, opts.seed), ScalarField(g, 0.5));
        const RunResult r = ctx.simulate(g, pq, fixed_dt(dt), s0, steps, "series_quartic_control.csv");
        double peak = 0.0;
        for (const auto& rec : r.series)
            peak = std::max(peak, 1.0 - rec.margin);
        ctx.record("quartic_control_max_abs_phi", "max ||phi||_inf of the quartic control run", peak);
    }
    ctx.note("Positivity is certified on the simulated horizon only; uniformity in time is not checkable.");
    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", ctx.rep.max_div, "<=",
              StepperConfig{}.projection_tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_continuous_dependence(const ExperimentOptions& opts)
{
    Ctx ctx("continuous_dependence", opts);
    const Grid g(64, 64);
    const double dt = 0.002;
    const long steps = 100;

    PhysParams p;
    p.chi = 0.1;
    p.alpha = 0.5;
    p.source = gaussian_source(1.0, 1.0);

    const ScalarField phi0 = spinodal_phase(g, 0.0, 0.05, opts.seed);
    const ScalarField sig0 = ScalarField::sample(g, [](double, double y) { return 0.5 + 0.1 * std::cos(pi * y); });
    const MacVelocity v0 = discrete_vortex(g, 0.05);
    const ScalarField dphi = ScalarField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    const ScalarField dsig = ScalarField::sample(g, [](double, double y) { return std::cos(2.0 * pi * y); });
    MacVelocity dv = discrete_vortex(g, 1.0);
    dv *= 1.0 / std::sqrt(face_inner_product(dv, dv));

    ctx.log("base run");
    std::vector<SimState> base_states;
    RunHooks keep;
    keep.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
        if (s.step_index == 20)
            base_states.push_back(s);
    };
    const SimState base0 = make_state(p, v0, phi0, sig0);
    const RunResult base = ctx.simulate(g, p, fixed_dt(dt), base0, steps, "series_base.csv", keep);

    auto gap = [](const SimState& a, const SimState& b) {
        const FaceField d = a.v - b.v;
        const double s = l2_norm(a.sigma - b.sigma);
        return face_inner_product(d, d) + h1_squared(a.phi - b.phi) + s * s;
    };

    std::vector<std::vector<double>> rows;
    std::vector<double> ratios;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        ctx.log("perturbed run eps = " + tag(eps));
        PhysParams pe = p;
        pe.source.amplitude += eps;
        const SimState pert0 = make_state(pe, v0 + eps * dv, phi0 + eps * dphi, sig0 + eps * dsig);
        const RunResult r = ctx.simulate(g, pe, fixed_dt(dt), pert0, steps);
        double source_gap = 0.0;
        for (long n = 1; n <= steps; ++n) {
            const double t = r.series[static_cast<std::size_t>(n)].t;
            const double d = l2_norm(pe.source.sample(g, t) - p.source.sample(g, t));
            source_gap += dt * d * d;
        }
        const double num = gap(r.final_state, base.final_state);
        const double den = gap(pert0, base0) + source_gap;
        const double ratio = num / den;
        ratios.push_back(ratio);
        rows.push_back({eps, num, den, ratio});
        ctx.check("gronwall_ratio_finite_eps_" + tag(eps), "G(eps) is finite", std::isfinite(ratio) ? 1.0 : 0.0, ">=",
                  1.0);
        ctx.record("gronwall_ratio_eps_" + tag(eps), "G(eps)", ratio);
    }
    write_table(ctx.opts.out_dir / "gronwall.csv", "eps,numerator,denominator,ratio", rows);
    const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                          *std::min_element(ratios.begin(), ratios.end());
    ctx.check("gronwall_ratio_spread", "max G / min G over eps in {1e-3, 1e-4, 1e-5}", spread, "<", 10.0);

    // eps = 0: repeating the base run gives a zero numerator.
    const RunResult again = ctx.simulate(g, p, fixed_dt(dt), base0, 20);
    const double zero_gap = base_states.empty() ? 1.0 : gap(again.final_state, base_states.front());
    ctx.check("zero_perturbation_numerator", "numerator of G for eps = 0", zero_gap, "<=", 0.0);

    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", ctx.rep.max_div, "<=",
              StepperConfig{}.projection_tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_decoupled_limits(const ExperimentOptions& opts)
{
    Ctx ctx("decoupled_limits", opts);
    const Grid g(64, 64);
    const double dt = 0.002;
    const long steps = 100;

    PhysParams p;
    p.chi = 0.0;
    p.lambda = 0.0;
    p.consumption = 0.0;
    const ScalarField phi0 = spinodal_phase(g, 0.0, 0.05, opts.seed);
    const ScalarField sig0 =
        ScalarField::sample(g, [](double x, double y) { return 0.5 + 0.3 * std::cos(pi * x) * std::cos(pi * y); });
    const SimState s0 = make_state(p, discrete_vortex(g, 0.05), phi0, sig0);

    ctx.log("(i) full system with chi = lambda = 0");
    std::vector<SimState> traj;
    RunHooks keep;
    keep.on_record = [&](const SimState& s, const DiagnosticsRecord&) { traj.push_back(s); };
    const RunResult full = ctx.simulate(g, p, fixed_dt(dt), s0, steps, "series_full.csv", keep);

    double rise = 0.0, drift = 0.0;
    const double m0 = traj.front().sigma.size() ? mean(traj.front().sigma) : 0.0;
    for (std::size_t n = 1; n < traj.size(); ++n) {
        const double a = l2_norm(traj[n - 1].sigma), b = l2_norm(traj[n].sigma);
        rise = std::max(rise, (0.5 * b * b - 0.5 * a * a) / (0.5 * a * a));
        drift = std::max(drift, std::abs(mean(traj[n].sigma) - m0) / std::abs(m0));
    }
    ctx.check("sigma_l2_nonincreasing", "max relative per-step increase of ||sigma||^2 / 2", rise, "<=", 1e-12);
    ctx.check("sigma_mean_constant", "max relative drift of mean sigma", drift, "<=", 1e-12);

    ctx.log("(i) nutrient equation disabled");
    StepperConfig off = fixed_dt(dt);
    off.solve_nutrient = false;
    std::size_t idx = 0;
    double mismatches = 0.0;
    RunHooks cmp;
    cmp.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
        if (idx >= traj.size() || !(s.phi == traj[idx].phi) || !(s.v == traj[idx].v))
            mismatches += 1.0;
        ++idx;
    };
    ctx.simulate(g, p, off, s0, steps, "series_nutrient_off.csv", cmp);
    ctx.check("phi_v_bit_identical", "steps where (phi, v) differ from the nutrient-disabled run", mismatches, "<=",
              0.0);

    ctx.log("(ii) lambda sweep");
    std::vector<SimState> finals;
    const std::vector<double> lambdas = {1.0, 0.1, 0.01};
    for (double lam : lambdas) {
        PhysParams pl = p;
        pl.chi = 0.1;
        pl.lambda = lam;
        finals.push_back(ctx.simulate(g, pl, fixed_dt(dt), make_state(pl, discrete_vortex(g, 0.05), phi0, sig0), 50)
                             .final_state);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        const FieldErrors d = state_differences(finals[k], finals[k + 1]);
        rows.push_back({lambdas[k], lambdas[k + 1], d.phi, d.sigma, d.velocity});
        ctx.record("cauchy_phi_" + tag(lambdas[k]) + "_" + tag(lambdas[k + 1]), "||phi_a - phi_b|| between sweep members",
                   d.phi);
        ctx.record("cauchy_sigma_" + tag(lambdas[k]) + "_" + tag(lambdas[k + 1]),
                   "||sigma_a - sigma_b|| between sweep members", d.sigma);
    }
    write_table(ctx.opts.out_dir / "lambda_sweep.csv", "lambda_a,lambda_b,phi_diff,sigma_diff,v_diff", rows);
    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", ctx.rep.max_div, "<=",
              StepperConfig{}.projection_tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

namespace {

PhysParams manufactured_params()
{
    PhysParams p;
    p.A = 1.0;
    p.B = 0.02;
    p.chi = 0.2;
    p.alpha = 0.5;
    p.c0 = 0.1;
    p.consumption = 0.3;
    p.eta1 = 1.0;
    p.eta2 = 0.5;
    p.potential = Potential::logarithmic(0.8, 1.0);
    return p;
}

}  // namespace

ExperimentReport exp_manufactured_convergence(const ExperimentOptions& opts)
{
    Ctx ctx("manufactured_convergence", opts);
    const PhysParams p = manufactured_params();
    const Manufactured m(p);
    const ExternalForcing forcing = m.forcing();

    {
        const Grid g(16, 16);
        const RunResult r = ctx.simulate(g, p, fixed_dt(0.01), m.sample_state(g, 0.0), 0, {}, {}, &forcing);
        const FieldErrors e = manufactured_errors(m, r.final_state);
        ctx.check("zero_time_error", "error of a run with no steps", std::max({e.phi, e.sigma, e.velocity}), "<=", 0.0);
    }

    // Space: dt proportional to h^2, so both error sources shrink by 4 per level.
    const double t_space = 0.1;
    std::vector<FieldErrors> errs;
    std::vector<std::vector<double>> rows;
    for (int n : {16, 32, 64}) {
        const Grid g(n, n);
        const long steps = 8L * (n / 16) * (n / 16);
        ctx.log("space level " + std::to_string(n) + ": " + std::to_string(steps) + " steps");
        const RunResult r =
            ctx.simulate(g, p, fixed_dt(t_space / steps), m.sample_state(g, 0.0), steps, {}, {}, &forcing);
        errs.push_back(manufactured_errors(m, r.final_state));
        rows.push_back({static_cast<double>(n), t_space / steps, errs.back().phi, errs.back().sigma, errs.back().velocity});
    }
    write_table(ctx.opts.out_dir / "space_errors.csv", "n,dt,phi_error,sigma_error,velocity_error", rows);
    auto orders = [](const FieldErrors& a, const FieldErrors& b) {
        return std::array<double, 3>{observed_order(a.phi, b.phi), observed_order(a.sigma, b.sigma),
                                     observed_order(a.velocity, b.velocity)};
    };
    const auto coarse = orders(errs[0], errs[1]);
    const auto fine = orders(errs[1], errs[2]);
    const char* fields[] = {"phi", "sigma", "velocity"};
    for (int k = 0; k < 3; ++k) {
        ctx.record(std::string("space_order_coarse_") + fields[k], "observed order between 16 and 32", coarse[k]);
        ctx.check(std::string("space_order_") + fields[k], "observed spatial order between 32 and 64", fine[k], ">=",
                  1.8);
    }

    // Time: self-convergence on a fixed grid removes the spatial error.
    const Grid gt(32, 32);
    const double t_time = 0.1;
    std::vector<SimState> finals;
    rows.clear();
    for (long steps : {80L, 160L, 320L}) {
        ctx.log("time level dt = " + format_double(t_time / steps));
        finals.push_back(
            ctx.simulate(gt, p, fixed_dt(t_time / steps), m.sample_state(gt, 0.0), steps, {}, {}, &forcing).final_state);
    }
    const FieldErrors d1 = state_differences(finals[0], finals[1]);
    const FieldErrors d2 = state_differences(finals[1], finals[2]);
    rows.push_back({t_time / 80, d1.phi, d1.sigma, d1.velocity});
    rows.push_back({t_time / 160, d2.phi, d2.sigma, d2.velocity});
    write_table(ctx.opts.out_dir / "time_differences.csv", "dt,phi_diff,sigma_diff,velocity_diff", rows);
    const auto to = orders(d1, d2);
    for (int k = 0; k < 3; ++k)
        ctx.check(std::string("time_order_") + fields[k], "observed temporal order (self-convergence)", to[k], ">=",
                  0.9);
    ctx.check("incompressibility", "||div v||_inf <= projection_tol after every step", ctx.rep.max_div, "<=",
              StepperConfig{}.projection_tol);
    return ctx.rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_elliptic(const ExperimentOptions& opts)
{
    Ctx ctx("elliptic", opts);

    // Constant data ln 3 with A = B = theta = 1: Psi0'(0.8) = atanh(0.8) = ln 3.
    {
        const Grid g(64, 64);
        EllipticProblem prob{1.0, 1.0, Potential::logarithmic(1.0, 1.0), ScalarField(g, std::log(3.0))};
        const EllipticSolution sol = solve_singular_neumann(prob);
        ScalarField err = sol.u;
        for (std::size_t k = 0; k < err.size(); ++k)
            err[k] = std::abs(err[k] - 0.8);
        ctx.check("constant_closed_form", "max |u - 0.8| for f = ln 3", linf_norm(err), "<=", 1e-9);
    }

    // Manufactured solution u = 0.5 cos(pi x) cos(pi y).
    auto mms_problem = [](const Grid& g) {
        const Potential pot = Potential::logarithmic(1.0, 1.0);
        const ScalarField f = ScalarField::sample(g, [&](double x, double y) {
            const double u = 0.5 * std::cos(pi * x) * std::cos(pi * y);
            return 2.0 * pi * pi * u + pot.psi0_prime(u);
        });
        return EllipticProblem{1.0, 1.0, pot, f};
    };
    std::vector<double> errs;
    std::vector<std::vector<double>> rows;
    for (int n : {16, 32, 64, 128}) {
        const Grid g(n, n);
        const EllipticSolution sol = solve_singular_neumann(mms_problem(g));
        const ScalarField exact =
            ScalarField::sample(g, [](double x, double y) { return 0.5 * std::cos(pi * x) * std::cos(pi * y); });
        errs.push_back(l2_norm(sol.u - exact));
        rows.push_back({static_cast<double>(n), errs.back(), errs.size() > 1 ? observed_order(errs[errs.size() - 2], errs.back()) : 0.0,
                        static_cast<double>(sol.newton_iters)});
    }
    write_table(ctx.opts.out_dir / "mms_errors.csv", "n,l2_error,order,newton_iters", rows);
    ctx.record("mms_order_16_32", "observed order between 16 and 32", observed_order(errs[0], errs[1]));
    ctx.record("mms_order_32_64", "observed order between 32 and 64", observed_order(errs[1], errs[2]));
    ctx.check("mms_order", "observed spatial order between 64 and 128", observed_order(errs[2], errs[3]), ">=", 1.8);

    // Uniqueness: random initial guesses converge to the same solution.
    {
        const Grid g(64, 64);
        const EllipticProblem prob = mms_problem(g);
        std::mt19937_64 rng(opts.seed);
        std::vector<ScalarField> sols;
        for (int k = 0; k < 10; ++k) {
            ScalarField init(g);
            for (std::size_t c = 0; c < init.size(); ++c)
                init[c] = 0.95 * (2.0 * uniform01(rng) - 1.0);
            sols.push_back(solve_singular_neumann(prob, init).u);
        }
        double spread = 0.0;
        for (const auto& s : sols)
            spread = std::max(spread, l2_norm(s - sols.front()));
        ctx.check("uniqueness_spread", "max l2 distance between solutions from 10 random starts", spread, "<=",
                  10.0 * prob.tol_residual);
    }

    // Margins stay positive as the data grow.
    {
        const Grid g(64, 64);
        const EllipticProblem base{1.0, 1.0, Potential::logarithmic(1.0, 1.0), ScalarField(g, std::log(3.0))};
        const MarginFamilyReport fam = margin_vs_data_bound(base, {1.0, 2.0, 4.0, 8.0});
        rows.clear();
        double min_margin = 1.0;
        for (const auto& e : fam.entries) {
            rows.push_back({e.scale, e.margin, e.psi0_prime_linf, e.data_norm, static_cast<double>(e.newton_iters)});
            min_margin = std::min(min_margin, e.margin);
        }
        write_table(ctx.opts.out_dir / "margin_family.csv", "scale,margin,psi0_prime_linf,data_norm,newton_iters", rows);
        ctx.check("margins_positive", "min separation margin over the data family", min_margin, ">", 0.0);
    }
    return ctx.rep;
}

// ---------------------------------------------------------------------------

const std::vector<ExperimentEntry>& experiment_registry()
{
    static const std::vector<ExperimentEntry> reg = {
        {"operators", "discrete divergence theorem, self-adjointness, incompressibility", exp_operators},
        {"mass_law", "exact discrete mean laws for phi and sigma", exp_mass_law},
        {"energy_dissipation", "energy decay, dissipation sign, residual order", exp_energy_dissipation},
        {"separation", "strict separation from the pure states", exp_separation},
        {"continuous_dependence", "stability of perturbed runs (Gronwall ratio)", exp_continuous_dependence},
        {"decoupled_limits", "decoupled nutrient limit and lambda sweep", exp_decoupled_limits},
        {"manufactured_convergence", "space and time orders for the coupled scheme", exp_manufactured_convergence},
        {"elliptic", "singular Neumann problem: closed form, order, uniqueness, margins", exp_elliptic},
    };
    return reg;
}

ExperimentReport run_experiment(const std::string& name, const ExperimentOptions& opts)
{
    const auto& reg = experiment_registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const ExperimentEntry& e) { return e.name == name; });
    if (it == reg.end())
        throw std::invalid_argument("unknown experiment '" + name + "'");
    ExperimentOptions sub = opts;
    sub.out_dir = opts.out_dir / name;
    fs::create_directories(sub.out_dir);
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep = it->fn(sub);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report(rep, sub.out_dir);
    return rep;
}

std::vector<ExperimentReport> run_all_experiments(const ExperimentOptions& opts)
{
    std::vector<ExperimentReport> out;
    for (const auto& e : experiment_registry())
        out.push_back(run_experiment(e.name, opts));
    std::ofstream os(opts.out_dir / "summary.csv");
    os << "experiment,checks,failed,passed\n";
    for (const auto& r : out) {
        const auto failed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; });
        os << r.name << ',' << r.checks.size() << ',' << failed << ',' << (r.passed() ? "true" : "false") << '\n';
    }
    return out;
}

void write_report(const ExperimentReport& r, const fs::path& dir)
{
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "report.csv");
        os << "check,measured,relation,threshold,pass,property\n";
        for (const auto& c : r.checks)
            os << c.name << ',' << format_double(c.measured) << ',' << c.relation << ','
               << (c.relation == "record" ? std::string() : format_double(c.threshold)) << ','
               << (c.pass ? "true" : "false") << ",\"" << c.property << "\"\n";
    }
    std::ofstream os(dir / "report.txt");
    os << "experiment " << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << '\n';
    for (const auto& c : r.checks) {
        if (c.relation == "record")
            os << "  info  " << c.name << " = " << format_double(c.measured) << "  (" << c.property << ")\n";
        else
            os << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name << " = " << format_double(c.measured) << ' '
               << c.relation << ' ' << format_double(c.threshold) << "  (" << c.property << ")\n";
    }
    for (const auto& n : r.notes)
        os << "  note  " << n << '\n';
}

}  // namespace chns
