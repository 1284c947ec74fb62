#pragma once

#include "chns/errors.hpp"
#include "chns/model.hpp"
#include "chns/sparse_ops.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/UmfPackSupport>

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace chns {

/// Extra right-hand sides added to the scheme, each evaluated at t^{n+1}.
/// Used for manufactured-solution studies; empty members contribute nothing.
struct ExternalForcing {
    std::function<double(double, double, double)> phi;    // phase equation
    std::function<double(double, double, double)> sigma;  // nutrient equation
    std::function<double(double, double, double)> u;      // x-momentum at x-faces
    std::function<double(double, double, double)> w;      // y-momentum at y-faces
};

struct ChResult {
    ScalarField phi;
    ScalarField mu;
    int newton_iters = 0;
    double residual = 0.0;
};

struct NsResult {
    MacVelocity v;
    ScalarField p;
    int momentum_iters = 0;
    int poisson_iters = 0;
    double div_linf = 0.0;
};

struct StepStats {
    double dt = 0.0;
    int ch_newton_iters = 0;
    int momentum_iters = 0;
    int poisson_iters = 0;
    int picard_iters = 1;
    int rejections = 0;
    double div_linf = 0.0;
    double ch_residual = 0.0;
};

/// A substep failed; the step may be retried with a smaller dt.
class StepRejected : public SolverError {
public:
    using SolverError::SolverError;
};

/// Repeated rejection drove dt below dt_min, or rejection without adapt_dt.
class StepAbort : public SolverError {
public:
    using SolverError::SolverError;
};

/// First-order coupled time integrator.
///
/// Each step runs, in order,
///  1. Cahn-Hilliard-Oono with convex splitting (Psi0 implicit, -theta0 phi
///     explicit) and implicit convection by the lagged velocity,
///  2. implicit nutrient advection-diffusion-reaction using the new phase,
///  3. projection: implicit variable-viscosity momentum, Neumann pressure
///     Poisson, velocity correction.
/// Picard coupling repeats the triple with the latest sigma and v in place of
/// the lagged ones.
class Stepper {
public:
    Stepper(const Grid& grid, PhysParams params, StepperConfig cfg);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    const PhysParams& params() const { return params_; }
    const StepperConfig& config() const { return cfg_; }
    const Grid& grid() const { return grid_; }

    void set_forcing(ExternalForcing f) { forcing_ = std::move(f); }

    /// Solves the convex-split phase system for (phi^{n+1}, mu^{n+1}).
    /// sigma_lag enters mu; v_adv advects phi. Throws StepRejected.
    ChResult ch_substep(const SimState& s, double dt, const ScalarField& sigma_lag, const MacVelocity& v_adv);
    ChResult ch_substep(const SimState& s, double dt) { return ch_substep(s, dt, s.sigma, s.v); }

    /// Implicit nutrient update using phi_new. Throws StepRejected.
    ScalarField nutrient_substep(const SimState& s, const ScalarField& phi_new, double dt, const MacVelocity& v_adv);
    ScalarField nutrient_substep(const SimState& s, const ScalarField& phi_new, double dt)
    {
        return nutrient_substep(s, phi_new, dt, s.v);
    }

    /// Projection step. Throws StepRejected.
    NsResult ns_substep(const SimState& s, const ScalarField& phi_new, const ScalarField& mu_new,
                        const ScalarField& sigma_new, double dt);

    /// One accepted step with the stepper's current dt (adaptive control
    /// included). Throws StepAbort.
    SimState step(const SimState& s, StepStats* stats = nullptr);

    /// Step of exactly `dt`; no adaptivity. Throws StepRejected.
    SimState step_fixed(const SimState& s, double dt, StepStats* stats = nullptr);

    double current_dt() const { return dt_; }
    void set_dt(double dt) { dt_ = dt; }

    ClampCounter& clamps() { return clamps_; }
    std::int64_t clamp_events() const { return clamps_.value(); }

    /// max|u| dt/hx + max|w| dt/hy.
    double cfl(const MacVelocity& v, double dt) const;

private:
    SparseMatrix ch_jacobian_template(const MacVelocity& v_adv, double dt) const;

    Grid grid_;
    PhysParams params_;
    StepperConfig cfg_;
    ExternalForcing forcing_;
    ClampCounter clamps_;
    double dt_;
    int accepted_since_change_ = 0;

    SparseMatrix lap_;
    SparseMatrix lap2_;
    VelocityDofs vdofs_;
    Eigen::UmfPackLU<SparseMatrix> ch_lu_;
    bool ch_pattern_ready_ = false;
    Eigen::UmfPackLU<SparseMatrix> nut_lu_;
    bool nut_pattern_ready_ = false;
    Eigen::SimplicialLDLT<SparseMatrix> poisson_;
};

}  // namespace chns
