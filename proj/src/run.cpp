#include "chns/run.hpp"

#include "chns/errors.hpp"

#include <cmath>
#include <limits>

namespace chns {

namespace {

class Runner {
public:
    Runner(Stepper& stepper, const SimState& initial, const RunHooks& hooks)
        : stepper_(stepper), hooks_(hooks), state_(initial)
    {
        try {
            nutrient_weight(stepper.params());
        } catch (const ConfigError&) {
            energy_defined_ = false;
        }
        DiagnosticsRecord r = record(state_, nullptr, 0.0, StepStats{});
        series_.push_back(r);
        emit(r, 0);
    }

    void advance(double dt_override = 0.0)
    {
        StepStats st;
        SimState next = dt_override > 0.0 ? stepper_.step_fixed(state_, dt_override, &st)
                                          : stepper_.step(state_, &st);
        DiagnosticsRecord r = record(next, &state_, st.dt, st);
        series_.push_back(r);
        state_ = std::move(next);
        emit(r, state_.step_index);
    }

    const SimState& state() const { return state_; }
    RunResult finish() { return RunResult{std::move(state_), std::move(series_)}; }

private:
    DiagnosticsRecord record(const SimState& s, const SimState* prev, double dt, const StepStats& st)
    {
        const PhysParams& p = stepper_.params();
        DiagnosticsRecord r;
        if (energy_defined_) {
            r = make_record(s, p);
            r.energy_residual = prev ? (r.E - series_.back().E) / dt + r.D - energy_source(s, p) : 0.0;
        } else {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.step = s.step_index;
            r.t = s.t;
            r.E = r.D = r.energy_residual = nan;
            r.phi_mean = mean(s.phi);
            r.sigma_mean = mean(s.sigma);
            r.margin = 1.0 - linf_norm(s.phi);
            r.div_linf = linf_norm(divergence(s.v));
        }
        r.dt = dt;
        r.ch_newton_iters = st.ch_newton_iters;
        r.momentum_iters = st.momentum_iters;
        r.poisson_iters = st.poisson_iters;
        r.clamp_events = stepper_.clamp_events();
        return r;
    }

    void emit(const DiagnosticsRecord& r, long step)
    {
        if (hooks_.on_record && hooks_.record_every > 0 && step % hooks_.record_every == 0)
            hooks_.on_record(state_, r);
        if (hooks_.on_output && hooks_.output_every > 0 && step % hooks_.output_every == 0)
            hooks_.on_output(state_);
    }

    Stepper& stepper_;
    const RunHooks& hooks_;
    SimState state_;
    std::vector<DiagnosticsRecord> series_;
    bool energy_defined_ = true;
};

}  // namespace

RunResult run(Stepper& stepper, const SimState& initial, double t_end, const RunHooks& hooks)
{
    Runner runner(stepper, initial, hooks);
    for (;;) {
        const double remaining = t_end - runner.state().t;
        const double dt = stepper.current_dt();
        if (remaining <= 1e-9 * dt)
            break;
        if (std::abs(remaining - dt) <= 1e-9 * dt || remaining > dt)
            runner.advance();
        else
            runner.advance(remaining);
    }
    return runner.finish();
}

RunResult run_steps(Stepper& stepper, const SimState& initial, long steps, const RunHooks& hooks)
{
    Runner runner(stepper, initial, hooks);
    for (long k = 0; k < steps; ++k)
        runner.advance();
    return runner.finish();
}

}  // namespace chns
