#include "chns/stepper.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chns {

namespace {

using Triplet = Eigen::Triplet<double>;

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

ScalarField sample_forcing(const Grid& g, const std::function<double(double, double, double)>& f, double t)
{
    if (!f)
        return ScalarField(g, 0.0);
    return ScalarField::sample(g, [&](double x, double y) { return f(x, y, t); });
}

}  // namespace

Stepper::Stepper(const Grid& grid, PhysParams params, StepperConfig cfg)
    : grid_(grid), params_(std::move(params)), cfg_(cfg), dt_(cfg.dt), lap_(laplacian_matrix(grid)), lap2_(lap_ * lap_),
      vdofs_(grid)
{
    params_.validate();
    cfg_.validate();
    if (!cfg_.dt_max)
        cfg_.dt_max = cfg_.dt;

    // Neumann pressure operator -lap with cell 0 pinned; the dropped equation
    // holds automatically because the right-hand side has zero sum.
    SparseMatrix p = -lap_;
    std::vector<Triplet> trip;
    for (long c = 0; c < p.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(p, c); it; ++it)
            if (it.row() != 0 && it.col() != 0)
                trip.emplace_back(it.row(), it.col(), it.value());
    trip.emplace_back(0, 0, 1.0);
    SparseMatrix pinned(p.rows(), p.cols());
    pinned.setFromTriplets(trip.begin(), trip.end());
    poisson_.compute(pinned);
    if (poisson_.info() != Eigen::Success)
        throw SolverError("pressure Poisson factorization failed");
}

Stepper::~Stepper() = default;

double Stepper::cfl(const MacVelocity& v, double dt) const
{
    double umax = 0.0, wmax = 0.0;
    for (double x : v.u_values())
        umax = std::max(umax, std::abs(x));
    for (double x : v.w_values())
        wmax = std::max(wmax, std::abs(x));
    return umax * dt / grid_.hx() + wmax * dt / grid_.hy();
}

SparseMatrix Stepper::ch_jacobian_template(const MacVelocity& v_adv, double dt) const
{
    // Newton matrix after eliminating the mu increment, minus the term
    // -A lap diag(Psi0''), which is added per iterate. The zero multiple of lap
    // keeps the sparsity pattern identical across iterates.
    const auto n = static_cast<long>(grid_.cells());
    SparseMatrix id(n, n);
    id.setIdentity();
    SparseMatrix jac = (1.0 / dt + params_.alpha) * id + advection_matrix(v_adv, cfg_.interp) +
                       params_.B * lap2_ + 0.0 * lap_;
    jac.makeCompressed();
    return jac;
}

ChResult Stepper::ch_substep(const SimState& s, double dt, const ScalarField& sigma_lag, const MacVelocity& v_adv)
{
    const PhysParams& pp = params_;
    const Potential& pot = pp.potential;
    const auto n = static_cast<long>(grid_.cells());
    const double t_new = s.t + dt;
    const ScalarField& phi_old = s.phi;

    const ScalarField f_phi = sample_forcing(grid_, forcing_.phi, t_new);
    const double decay = 1.0 / (1.0 + pp.alpha * dt);
    // The mean obeys (m - mean_old)/dt + alpha (m - c0) = mean(f_phi) exactly.
    const double target_mean = pp.c0 + (mean(phi_old) - pp.c0 + dt * mean(f_phi)) * decay;

    ScalarField phi(grid_);
    for (long k = 0; k < n; ++k)
        phi[k] = pp.c0 + (phi_old[k] - pp.c0) * decay;

    // mu^{n+1} = A Psi0'(phi) - A theta0 phi^n - B lap(phi) - chi sigma
    ScalarField explicit_part(grid_);
    for (long k = 0; k < n; ++k)
        explicit_part[k] = -pp.A * pot.theta0() * phi_old[k] - pp.chi * sigma_lag[k];
    auto mu_of = [&](const ScalarField& ph) {
        ScalarField m = laplacian_neumann(ph);
        for (long k = 0; k < n; ++k)
            m[k] = pp.A * pot.psi0_prime(ph[k], &clamps_) - pp.B * m[k] + explicit_part[k];
        return m;
    };
    ScalarField mu = mu_of(phi);

    ScalarField r1(grid_), r2(grid_);
    auto residuals = [&](const ScalarField& ph, const ScalarField& m) {
        const ScalarField adv = advect_conservative(v_adv, ph, cfg_.interp);
        const ScalarField lap_mu = laplacian_neumann(m);
        const ScalarField lap_phi = laplacian_neumann(ph);
        for (long k = 0; k < n; ++k) {
            r1[k] = (ph[k] - phi_old[k]) / dt + adv[k] - lap_mu[k] + pp.alpha * (ph[k] - pp.c0) - f_phi[k];
            r2[k] = m[k] - pp.A * pot.psi0_prime(ph[k], &clamps_) + pp.B * lap_phi[k] - explicit_part[k];
        }
        return std::max(dt * l2_norm(r1), l2_norm(r2));
    };
    const double lap_norm = 4.0 * (1.0 / (grid_.hx() * grid_.hx()) + 1.0 / (grid_.hy() * grid_.hy()));
    const double vmax = linf_norm(v_adv);
    auto roundoff_floor = [&](const ScalarField& ph, const ScalarField& m) {
        double d2 = 0.0;
        for (long k = 0; k < n; ++k)
            d2 = std::max(d2, pot.psi0_second(ph[k]));
        const double phin = std::max(linf_norm(ph), linf_norm(phi_old));
        const double eps = std::numeric_limits<double>::epsilon();
        const double f1 = phin + dt * (vmax * phin * 2.0 * lap_norm + lap_norm * linf_norm(m) + linf_norm(f_phi));
        const double f2 = linf_norm(m) + pp.A * d2 * phin + pp.B * lap_norm * phin + linf_norm(explicit_part);
        return 16.0 * eps * std::max(f1, f2) * std::sqrt(grid_.area());
    };

    double res = residuals(phi, mu);
    const SparseMatrix jac_template = ch_jacobian_template(v_adv, dt);
    ChResult out{phi, mu, 0, res};

    Vector dpsi(n);
    SparseMatrix jac;  // the LU solve reads the factored matrix, keep it alive
    bool factored = false;
    double last_ratio = 1.0;
    for (int it = 0;; ++it) {
        if (res <= std::max(cfg_.newton_tol, roundoff_floor(phi, mu))) {
            out.phi = std::move(phi);
            out.mu = std::move(mu);
            out.newton_iters = it;
            out.residual = res;
            return out;
        }
        if (it >= cfg_.max_newton) {
            std::ostringstream os;
            os << "phase Newton did not converge in " << cfg_.max_newton << " iterations (residual " << res << ")";
            throw StepRejected(os.str());
        }

        // Eliminating mu: d_mu = -r2 + (A D - B lap) d_phi, and
        // (a I + adv - A lap D + B lap^2) d_phi = -r1 - lap r2.
        // The factorization is kept while the residual contracts fast
        // (chord steps) and refreshed at the current iterate otherwise.
        const bool refresh = !factored || last_ratio > 0.25;
        if (refresh) {
            for (long k = 0; k < n; ++k)
                dpsi[k] = -pp.A * pot.psi0_second(phi[k], &clamps_);
            jac = jac_template + lap_ * dpsi.asDiagonal();
            if (!ch_pattern_ready_) {
                ch_lu_.analyzePattern(jac);
                ch_pattern_ready_ = true;
            }
            ch_lu_.factorize(jac);
            if (ch_lu_.info() != Eigen::Success)
                throw StepRejected("phase Newton Jacobian factorization failed");
            factored = true;
        }
        const Vector r2v = to_vector(r2);
        const Vector rhs = -to_vector(r1) - lap_ * r2v;
        const Vector dphi = ch_lu_.solve(rhs);
        if (ch_lu_.info() != Eigen::Success || !dphi.allFinite())
            throw StepRejected("phase Newton linear solve failed");
        const Vector dmu = -r2v - dpsi.cwiseProduct(dphi) - pp.B * (lap_ * dphi);
        Vector delta(2 * n);
        delta << dphi, dmu;

        // The exact Newton increment carries the whole mean correction; remove
        // rounding drift so every iterate keeps the prescribed mean.
        double dmean = 0.0;
        for (long k = 0; k < n; ++k)
            dmean += delta[k];
        dmean /= static_cast<double>(n);
        const double shift = (target_mean - mean(phi)) - dmean;

        double step = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
            ScalarField trial_phi = phi;
            ScalarField trial_mu = mu;
            bool inside = true;
            for (long k = 0; k < n; ++k) {
                trial_phi[k] = phi[k] + step * (delta[k] + shift);
                trial_mu[k] = mu[k] + step * delta[n + k];
                if (!pot.admissible(trial_phi[k])) {
                    inside = false;
                    break;
                }
            }
            if (!inside)
                continue;
            const double trial_res = residuals(trial_phi, trial_mu);
            if (trial_res < res) {
                last_ratio = halving == 0 ? trial_res / res : 1.0;
                phi = std::move(trial_phi);
                mu = std::move(trial_mu);
                res = trial_res;
                accepted = true;
                break;
            }
        }
        if (!accepted && !refresh) {
            last_ratio = 1.0;
            continue;
        }
        if (!accepted) {
            residuals(phi, mu);
            std::ostringstream os;
            os << "phase Newton damping stalled at residual " << res;
            throw StepRejected(os.str());
        }
    }
}

ScalarField Stepper::nutrient_substep(const SimState& s, const ScalarField& phi_new, double dt,
                                      const MacVelocity& v_adv)
{
    const PhysParams& pp = params_;
    const auto n = static_cast<long>(grid_.cells());
    const double t_new = s.t + dt;

    const SparseMatrix adv = advection_matrix(v_adv, cfg_.interp);
    SparseMatrix m = adv - lap_;
    for (long k = 0; k < n; ++k)
        m.coeffRef(k, k) += 1.0 / dt + pp.consumption * pp.h(phi_new[k]);
    m.makeCompressed();

    const ScalarField src = pp.source.sample(grid_, t_new);
    const ScalarField f_sigma = sample_forcing(grid_, forcing_.sigma, t_new);
    const ScalarField lap_phi = laplacian_neumann(phi_new);
    Vector rhs(n);
    const double lam = pp.lam();
    for (long k = 0; k < n; ++k)
        rhs[k] = s.sigma[k] / dt - lam * lap_phi[k] + src[k] + f_sigma[k];

    if (!nut_pattern_ready_) {
        nut_lu_.analyzePattern(m);
        nut_pattern_ready_ = true;
    }
    nut_lu_.factorize(m);
    if (nut_lu_.info() != Eigen::Success)
        throw StepRejected("nutrient factorization failed");
    const Vector x = nut_lu_.solve(rhs);
    if (nut_lu_.info() != Eigen::Success || !x.allFinite())
        throw StepRejected("nutrient solve failed");
    return to_field(grid_, x);
}

NsResult Stepper::ns_substep(const SimState& s, const ScalarField& phi_new, const ScalarField& mu_new,
                             const ScalarField& sigma_new, double dt)
{
    const PhysParams& pp = params_;
    const double t_new = s.t + dt;

    ScalarField eta(grid_);
    for (std::size_t k = 0; k < eta.size(); ++k)
        eta[k] = pp.eta(phi_new[k]);

    // Capillary/chemotactic forcing (mu + chi sigma) grad(phi) on faces.
    ScalarField potential = mu_new;
    for (std::size_t k = 0; k < potential.size(); ++k)
        potential[k] += pp.chi * sigma_new[k];
    const FaceField pot_faces = cell_to_faces(potential);
    const FaceField grad_phi = gradient(phi_new);
    const FaceField conv = momentum_convection(s.v);

    FaceField rhs_field(grid_);
    const Grid& g = grid_;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            double f = s.v.u(i, j) / dt - conv.u(i, j) + pot_faces.u(i, j) * grad_phi.u(i, j);
            if (forcing_.u)
                f += forcing_.u(g.xn(i), g.yc(j), t_new);
            rhs_field.u(i, j) = f;
        }
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            double f = s.v.w(i, j) / dt - conv.w(i, j) + pot_faces.w(i, j) * grad_phi.w(i, j);
            if (forcing_.w)
                f += forcing_.w(g.xc(i), g.yn(j), t_new);
            rhs_field.w(i, j) = f;
        }

    SparseMatrix m = viscous_matrix(vdofs_, eta);
    for (long k = 0; k < m.rows(); ++k)
        m.coeffRef(k, k) += 1.0 / dt;
    m.makeCompressed();

    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(cfg_.linear_tol);
    cg.setMaxIterations(static_cast<long>(4 * vdofs_.size()));
    cg.compute(m);
    const Vector b = vdofs_.gather(rhs_field);
    Vector x = b.isZero(0.0) ? Vector(Vector::Zero(b.size())) : Vector(cg.solveWithGuess(b, vdofs_.gather(s.v)));
    const int momentum_iters = b.isZero(0.0) ? 0 : static_cast<int>(cg.iterations());
    if (!b.isZero(0.0) && cg.info() != Eigen::Success)
        throw StepRejected("momentum solve did not converge");
    MacVelocity v_star = vdofs_.scatter(x);

    const ScalarField div_star = divergence(v_star);
    Vector prhs = -to_vector(div_star) / dt;
    prhs[0] = 0.0;
    Vector pv = poisson_.solve(prhs);
    if (poisson_.info() != Eigen::Success || !pv.allFinite())
        throw StepRejected("pressure Poisson solve failed");
    pv.array() -= pv.mean();
    ScalarField p = to_field(grid_, pv);

    FaceField gp = gradient(p);
    gp *= dt;
    MacVelocity v_new = v_star - gp;
    v_new.zero_boundary_normal();

    NsResult out{std::move(v_new), std::move(p), momentum_iters, 1, 0.0};
    out.div_linf = linf_norm(divergence(out.v));
    if (!(out.div_linf <= cfg_.projection_tol)) {
        std::ostringstream os;
        os << "projection left max |div v| = " << out.div_linf;
        throw StepRejected(os.str());
    }
    return out;
}

SimState Stepper::step_fixed(const SimState& s, double dt, StepStats* stats)
{
    StepStats st;
    st.dt = dt;
    const int kmax = cfg_.coupling == Coupling::picard ? cfg_.picard_kmax : 1;

    ScalarField sigma_lag = s.sigma;
    MacVelocity v_adv = s.v;
    SimState next(grid_);
    for (int k = 1; k <= kmax; ++k) {
        ChResult ch = ch_substep(s, dt, sigma_lag, v_adv);
        ScalarField sigma_new = cfg_.solve_nutrient ? nutrient_substep(s, ch.phi, dt, v_adv) : s.sigma;
        NsResult ns = cfg_.solve_flow ? ns_substep(s, ch.phi, ch.mu, sigma_new, dt)
                                      : NsResult{s.v, s.p, 0, 0, linf_norm(divergence(s.v))};
        st.ch_newton_iters += ch.newton_iters;
        st.ch_residual = ch.residual;
        st.momentum_iters += ns.momentum_iters;
        st.poisson_iters += ns.poisson_iters;
        st.div_linf = ns.div_linf;
        st.picard_iters = k;

        double change = 0.0;
        if (k > 1)
            change = std::max({max_abs_diff(ch.phi.values(), next.phi.values()),
                               max_abs_diff(sigma_new.values(), next.sigma.values()),
                               max_abs_diff(ns.v.u_values(), next.v.u_values()),
                               max_abs_diff(ns.v.w_values(), next.v.w_values())});
        next.phi = std::move(ch.phi);
        next.mu = std::move(ch.mu);
        next.sigma = std::move(sigma_new);
        next.v = std::move(ns.v);
        next.p = std::move(ns.p);
        if (k > 1 && change < cfg_.picard_tol)
            break;
        sigma_lag = next.sigma;
        v_adv = next.v;
    }
    next.t = s.t + dt;
    next.step_index = s.step_index + 1;
    if (stats)
        *stats = st;
    return next;
}

SimState Stepper::step(const SimState& s, StepStats* stats)
{
    double dt = dt_;
    if (cfg_.adapt_dt)
        while (cfl(s.v, dt) > cfg_.cfl_max && dt * 0.5 >= cfg_.dt_min)
            dt *= 0.5;
    int rejections = 0;
    for (;;) {
        try {
            StepStats st;
            SimState next = step_fixed(s, dt, &st);
            st.rejections = rejections;
            if (stats)
                *stats = st;
            if (dt != dt_) {
                dt_ = dt;
                accepted_since_change_ = 0;
            }
            if (cfg_.adapt_dt && ++accepted_since_change_ >= 10) {
                dt_ = std::min(2.0 * dt_, *cfg_.dt_max);
                accepted_since_change_ = 0;
            }
            return next;
        } catch (const StepRejected& e) {
            if (!cfg_.adapt_dt)
                throw StepAbort(std::string("step rejected: ") + e.what());
            ++rejections;
            dt *= 0.5;
            if (dt < cfg_.dt_min) {
                std::ostringstream os;
                os << "dt fell below dt_min after " << rejections << " rejections at t = " << s.t
                   << "; last failure: " << e.what();
                throw StepAbort(os.str());
            }
        }
    }
}

}  // namespace chns
