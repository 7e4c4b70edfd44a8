#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dyadic/params.hpp"

namespace dyadic {

/// Time-stepping flavour.  Both use the same embedded Dormand-Prince 5(4)
/// pair; the integrating-factor variant propagates the viscous diagonal with
/// exact exponentials so the step size is never limited by stiffness.
/// auto_select resolves to integrating_factor when nu > 0 and either
/// n_modes > 24 or nu * lambda^(2*alpha*N) * dt_init exceeds 1, and to the
/// plain explicit pair otherwise.
enum class step_mode { auto_select, explicit_embedded, integrating_factor };

struct stepper_config {
    step_mode mode = step_mode::auto_select;
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    /// Zero fields resolve against the horizon: dt_init to 1e-4*(t_end-t0)
    /// clamped into [dt_min, dt_max], dt_min to 1e-12*(t_end-t0), dt_max to
    /// t_end-t0.  After resolution 0 < dt_min <= dt_init <= dt_max must hold.
    double dt_init = 0.0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    std::uint64_t max_steps = 10'000'000;
    /// Drop the cascade term from the right-hand side (diagnostic runs; the
    /// integrating-factor mode then reproduces the closed-form decay).
    bool disable_nonlinear = false;
};

/// Condition checked after every accepted step; triggering one stops the run.
struct event_spec {
    enum class kind { norm_threshold, dt_floor, tail_fraction };
    kind k = kind::norm_threshold;
    double threshold = 0.0;
    double gamma = 0.0;  ///< norm weight (norm_threshold, tail_fraction)
    int width = 5;       ///< number of top modes (tail_fraction)
};

struct event_hit {
    double t = 0.0;
    event_spec spec;
    double value = 0.0;
};

enum class run_status { reached_t_end, event_stop, step_floor, max_steps };

struct trajectory {
    std::vector<state> samples;    ///< strictly increasing sample times
    std::vector<event_hit> events;
    run_status status = run_status::reached_t_end;
    step_mode mode_used = step_mode::explicit_embedded;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_rejected = 0;
};

/// One attempted step of size dt.  Returns the candidate state and the
/// tolerance-scaled error estimate (acceptable when <= 1).  Never clips
/// negative amplitudes.  Throws finite_check_error if the candidate state is
/// not finite.
std::pair<state, double> step(const state& s, double dt, const model_params& p,
                              const stepper_config& cfg);

/// Adaptive integration from s.t to t_end.  sample_every > 0 emits samples on
/// that cadence (step sizes are clamped to land on sample times exactly);
/// sample_every == 0 records every accepted step.  The initial state and the
/// final state are always part of the sample list.  Terminates at t_end, on
/// the first triggered event, when the controller needs a step below dt_min
/// (a blow-up proxy), or after max_steps accepted steps.
trajectory integrate(const state& s, double t_end, const model_params& p,
                     const stepper_config& cfg,
                     const std::vector<event_spec>& events = {},
                     double sample_every = 0.0);

/// Smallest amplitude seen anywhere in the sampled trajectory.
double positivity_floor(const trajectory& tr);

}  // namespace dyadic
