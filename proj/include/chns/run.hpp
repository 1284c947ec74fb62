#pragma once

#include "chns/diagnostics.hpp"
#include "chns/stepper.hpp"

#include <functional>
#include <vector>

namespace chns {

struct RunHooks {
    /// Called for the initial state and then every `record_every` accepted steps.
    std::function<void(const SimState&, const DiagnosticsRecord&)> on_record;
    int record_every = 1;
    /// Called for the initial state and then every `output_every` steps (0 disables).
    std::function<void(const SimState&)> on_output;
    int output_every = 0;
};

struct RunResult {
    SimState final_state;
    /// One record per accepted step, starting with the initial state.
    std::vector<DiagnosticsRecord> series;
};

/// Advances until t_end (the last step is shortened to land on t_end).
RunResult run(Stepper& stepper, const SimState& initial, double t_end, const RunHooks& hooks = {});

/// Advances exactly `steps` accepted steps.
RunResult run_steps(Stepper& stepper, const SimState& initial, long steps, const RunHooks& hooks = {});

}  // namespace chns
