#include "dyadic/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "dyadic/kernels.hpp"
#include "dyadic/model.hpp"

namespace dyadic {
namespace {

// Dormand-Prince 5(4) tableau.  The c values are nondecreasing, so every
// exponential weight used by the integrating-factor variant decays; no
// growing exponential is ever formed.
constexpr int n_stages = 7;
constexpr double C[n_stages] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                                8.0 / 9, 1.0,     1.0};
constexpr double A[n_stages][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b - bhat: weights of the embedded error estimate.
constexpr double E[n_stages] = {71.0 / 57600, 0.0,          -71.0 / 16695,
                                71.0 / 1920,  -17253.0 / 339200,
                                22.0 / 525,   -1.0 / 40};

// Distinct positive multiples of dt whose decay exponentials a step needs.
constexpr int n_thetas = 13;
constexpr double THETA[n_thetas] = {
    1.0 / 10, 1.0 / 9, 1.0 / 5,  3.0 / 10, 4.0 / 45, 1.0 / 2, 53.0 / 90,
    3.0 / 5,  31.0 / 45, 7.0 / 10, 4.0 / 5, 8.0 / 9,  1.0};
enum : int {
    TH_1_10, TH_1_9, TH_1_5, TH_3_10, TH_4_45, TH_1_2, TH_53_90,
    TH_3_5, TH_31_45, TH_7_10, TH_4_5, TH_8_9, TH_1, TH_ID = -1
};
// theta index of exp(-D*c_i*dt) per stage (stage 0 needs none).
constexpr int STAGE_TH[n_stages] = {TH_ID, TH_1_5, TH_3_10, TH_4_5,
                                    TH_8_9, TH_1,  TH_1};
// theta index of exp(-D*(c_i-c_j)*dt) per tableau entry.
constexpr int A_TH[n_stages][6] = {
    {},
    {TH_1_5},
    {TH_3_10, TH_1_10},
    {TH_4_5, TH_3_5, TH_1_2},
    {TH_8_9, TH_31_45, TH_53_90, TH_4_45},
    {TH_1, TH_4_5, TH_7_10, TH_1_5, TH_1_9},
    {TH_1, TH_ID, TH_7_10, TH_1_5, TH_1_9, TH_ID},
};
// theta index of exp(-D*(1-c_i)*dt) used by the error estimate.
constexpr int ERR_TH[n_stages] = {TH_1,  TH_ID, TH_7_10, TH_1_5,
                                  TH_1_9, TH_ID, TH_ID};

struct workspace {
    model_params p;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    bool if_mode = false;
    bool drop_nonlinear = false;
    std::size_t n = 0;

    std::vector<double> d;        // viscous rates nu * lambda^(2 alpha n)
    std::vector<double> nu_d_eff; // rates seen by the stage derivative
    std::vector<double> la, lb;   // cascade coefficients (zeroed if dropped)
    std::vector<double> g_hold;   // force seen by the stage derivative
    const double* g_eff = nullptr;
    std::vector<double> u_inf;    // fixed point of the affine viscous flow
    std::vector<double> v0;
    std::array<std::vector<double>, n_stages> f;
    std::array<std::vector<double>, n_thetas> th;
    double th_dt = -1.0;
    std::vector<double> us, err, u_new;
};

step_mode resolve_mode(const stepper_config& cfg, const model_params& p,
                       double dt_init) {
    if (cfg.mode != step_mode::auto_select) return cfg.mode;
    if (p.nu == 0.0) return step_mode::explicit_embedded;  // nothing is stiff
    if (p.n_modes > 24) return step_mode::integrating_factor;
    const double top_rate = p.dissipation_rate(p.n_modes);
    if (top_rate * dt_init > 1.0) return step_mode::integrating_factor;
    return step_mode::explicit_embedded;
}

workspace make_workspace(const model_params& p, const stepper_config& cfg,
                         step_mode mode) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw range_error("tolerances must be positive");
    workspace ws;
    ws.p = p;
    ws.rel_tol = cfg.rel_tol;
    ws.abs_tol = cfg.abs_tol;
    ws.drop_nonlinear = cfg.disable_nonlinear;
    ws.n = static_cast<std::size_t>(p.n_modes);
    // With nu = 0 there is no viscous diagonal; the integrating-factor and
    // explicit variants coincide, so run the cheaper explicit path.
    ws.if_mode = mode == step_mode::integrating_factor && p.nu > 0.0;

    ws.d.resize(ws.n);
    ws.la.assign(ws.n, 0.0);
    ws.lb.assign(ws.n, 0.0);
    for (std::size_t i = 0; i < ws.n; ++i) {
        ws.d[i] = p.dissipation_rate(static_cast<int>(i) + 1);
        if (!cfg.disable_nonlinear) {
            ws.la[i] = std::pow(p.lambda, static_cast<double>(i) + 1.0);
            ws.lb[i] = std::pow(p.lambda, static_cast<double>(i) + 2.0);
        }
    }
    if (ws.if_mode) {
        ws.nu_d_eff.assign(ws.n, 0.0);
        // Constant force folds into the exactly-propagated affine flow via
        // the fixed point g/D, so stages only approximate the cascade term.
        ws.u_inf.assign(ws.n, 0.0);
        for (std::size_t i = 0; i < ws.n; ++i)
            if (!p.force.empty()) ws.u_inf[i] = p.force[i] / ws.d[i];
        ws.g_eff = nullptr;
    } else {
        ws.nu_d_eff = ws.d;
        if (!p.force.empty()) {
            ws.g_hold = p.force;
            ws.g_eff = ws.g_hold.data();
        }
    }
    ws.v0.resize(ws.n);
    for (auto& fi : ws.f) fi.resize(ws.n);
    if (ws.if_mode)
        for (auto& t : ws.th) t.resize(ws.n);
    ws.us.resize(ws.n);
    ws.err.resize(ws.n);
    ws.u_new.resize(ws.n);
    return ws;
}

void eval_derivative(workspace& ws, const std::vector<double>& u,
                     std::vector<double>& out) {
    kernels::active().rhs(u.data(), ws.nu_d_eff.data(), ws.la.data(),
                          ws.lb.data(), ws.g_eff, out.data(), ws.n);
}

void build_tables(workspace& ws, double dt) {
    if (dt == ws.th_dt) return;
    for (int k = 0; k < n_thetas; ++k) {
        const double s = THETA[k] * dt;
        for (std::size_t i = 0; i < ws.n; ++i)
            ws.th[k][i] = std::exp(-ws.d[i] * s);
    }
    ws.th_dt = dt;
}

/// One step attempt.  ws.f[0] must hold the derivative at u0.  Returns the
/// tolerance-scaled error norm; +inf marks a non-finite candidate.
double attempt(workspace& ws, const std::vector<double>& u0, double dt) {
    const auto& kr = kernels::active();
    const std::size_t n = ws.n;

    if (ws.if_mode) {
        build_tables(ws, dt);
        for (std::size_t i = 0; i < n; ++i) ws.v0[i] = u0[i] - ws.u_inf[i];
    }

    for (int s = 1; s < n_stages; ++s) {
        std::vector<double>& target = s == n_stages - 1 ? ws.u_new : ws.us;
        if (ws.if_mode) {
            kr.hadamard(ws.th[STAGE_TH[s]].data(), ws.v0.data(), target.data(),
                        n);
            kr.axpy(1.0, ws.u_inf.data(), target.data(), n);
        } else {
            std::copy(u0.begin(), u0.end(), target.begin());
        }
        for (int j = 0; j < s; ++j) {
            const double a = A[s][j];
            if (a == 0.0) continue;
            const int t = A_TH[s][j];
            if (ws.if_mode && t != TH_ID)
                kr.scaled_mul_add(dt * a, ws.th[t].data(), ws.f[j].data(),
                                  target.data(), n);
            else
                kr.axpy(dt * a, ws.f[j].data(), target.data(), n);
        }
        eval_derivative(ws, target, ws.f[s]);
    }

    std::fill(ws.err.begin(), ws.err.end(), 0.0);
    for (int s = 0; s < n_stages; ++s) {
        if (E[s] == 0.0) continue;
        const int t = ERR_TH[s];
        if (ws.if_mode && t != TH_ID)
            kr.scaled_mul_add(dt * E[s], ws.th[t].data(), ws.f[s].data(),
                              ws.err.data(), n);
        else
            kr.axpy(dt * E[s], ws.f[s].data(), ws.err.data(), n);
    }

    double sum = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ws.u_new[i])) finite = false;
        const double mag = std::max(std::abs(u0[i]), std::abs(ws.u_new[i]));
        const double scale = std::max(ws.abs_tol, ws.rel_tol * mag);
        const double q = ws.err[i] / scale;
        sum += q * q;
    }
    const double norm = std::sqrt(sum / static_cast<double>(n));
    if (!finite || !std::isfinite(norm))
        return std::numeric_limits<double>::infinity();
    return norm;
}

double grow_factor(double err) {
    if (err == 0.0) return 5.0;
    return std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
}

double shrink_factor(double err) {
    if (!std::isfinite(err)) return 0.1;
    return std::min(0.9, std::max(0.1, 0.9 * std::pow(err, -0.2)));
}

struct resolved_steps {
    double dt_init, dt_min, dt_max;
};

resolved_steps resolve_steps(const stepper_config& cfg, double span) {
    resolved_steps r{};
    r.dt_min = cfg.dt_min > 0.0 ? cfg.dt_min : 1e-12 * span;
    r.dt_max = cfg.dt_max > 0.0 ? cfg.dt_max : span;
    r.dt_init = cfg.dt_init > 0.0
                    ? cfg.dt_init
                    : std::clamp(1e-4 * span, r.dt_min, r.dt_max);
    if (!(r.dt_min > 0.0) || !(r.dt_min <= r.dt_init) ||
        !(r.dt_init <= r.dt_max))
        throw range_error("step sizes must satisfy 0 < dt_min <= dt_init <= dt_max");
    return r;
}

}  // namespace

std::pair<state, double> step(const state& s, double dt, const model_params& p,
                              const stepper_config& cfg) {
    p.validate();
    if (static_cast<int>(s.u.size()) != p.n_modes)
        throw dimension_error("step: state has " + std::to_string(s.u.size()) +
                              " modes, expected " + std::to_string(p.n_modes));
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw range_error("step size must be finite and positive");
    workspace ws = make_workspace(p, cfg, resolve_mode(cfg, p, dt));
    eval_derivative(ws, s.u, ws.f[0]);
    const double err = attempt(ws, s.u, dt);
    if (std::isinf(err))
        throw finite_check_error("non-finite state after step attempt at t = " +
                                 std::to_string(s.t));
    return {state{s.t + dt, ws.u_new}, err};
}

trajectory integrate(const state& s, double t_end, const model_params& p,
                     const stepper_config& cfg,
                     const std::vector<event_spec>& events,
                     double sample_every) {
    p.validate();
    if (static_cast<int>(s.u.size()) != p.n_modes)
        throw dimension_error("integrate: state has " +
                              std::to_string(s.u.size()) + " modes, expected " +
                              std::to_string(p.n_modes));
    if (!(t_end >= s.t))
        throw range_error("t_end must not precede the initial time");
    if (sample_every < 0.0)
        throw range_error("sample_every must be >= 0");
    for (const auto& ev : events)
        if (ev.k == event_spec::kind::tail_fraction && ev.width < 1)
            throw range_error("tail_fraction event needs width >= 1");

    trajectory tr;
    tr.samples.push_back(s);
    if (t_end == s.t) return tr;

    const double span = t_end - s.t;
    const resolved_steps rs = resolve_steps(cfg, span);
    const step_mode mode = resolve_mode(cfg, p, rs.dt_init);
    tr.mode_used = mode;
    workspace ws = make_workspace(p, cfg, mode);

    double t = s.t;
    // Exact sub-resolution remainder of the running time.  Near a fast
    // spectral front the controller legitimately wants dt below one ulp of
    // t; the system is autonomous, so the only place time enters is this
    // accumulator.  A compensated sum keeps those steps from vanishing.
    double t_frac = 0.0;
    std::vector<double> u = s.u;
    eval_derivative(ws, u, ws.f[0]);

    double dt_ctrl = rs.dt_init;
    std::uint64_t sample_idx = 1;
    double next_sample =
        sample_every > 0.0 ? s.t + sample_every : t_end;

    auto push_sample = [&](double ts, const std::vector<double>& us) {
        if (!tr.samples.empty() && !(ts > tr.samples.back().t)) {
            tr.samples.back().u = us;  // same instant: keep the latest state
            return;
        }
        tr.samples.push_back(state{ts, us});
    };

    while (true) {
        if (t >= t_end) {
            tr.status = run_status::reached_t_end;
            break;
        }
        if (tr.n_accepted >= cfg.max_steps) {
            tr.status = run_status::max_steps;
            break;
        }

        // Skip sample marks the time variable can no longer distinguish.
        if (sample_every > 0.0) {
            while (next_sample <= t) {
                ++sample_idx;
                next_sample = s.t + static_cast<double>(sample_idx) * sample_every;
            }
        }
        const double t_target = std::min(t_end, next_sample);

        double dt_try = std::min(dt_ctrl, rs.dt_max);
        bool at_floor = false;
        if (dt_try < rs.dt_min) {
            dt_try = rs.dt_min;
            at_floor = true;
        }
        bool landed = false;
        if (t + dt_try >= t_target) {
            dt_try = t_target - t;
            landed = true;
            if (!(dt_try > 0.0)) {
                // Target collided with the current time at full precision.
                t = t_target;
                continue;
            }
        }

        const double err = attempt(ws, u, dt_try);

        if (err <= 1.0) {
            u = ws.u_new;
            ws.f[0].swap(ws.f[6]);  // first-same-as-last reuse
            if (landed) {
                t = t_target;
            } else {
                // Two-sum accumulation: t + t_frac + dt_try is preserved
                // exactly, with t holding the rounded representative.
                t_frac += dt_try;
                const double t_new = t + t_frac;
                const double hi = t_new - t;
                t_frac = (t - (t_new - hi)) + (t_frac - hi);
                t = t_new;
            }
            ++tr.n_accepted;

            if (sample_every == 0.0) {
                push_sample(t, u);
            } else if (landed && t_target == next_sample) {
                push_sample(t, u);
                ++sample_idx;
                next_sample = s.t + static_cast<double>(sample_idx) * sample_every;
            }

            bool stopped = false;
            for (const auto& ev : events) {
                double value = 0.0;
                bool hit = false;
                switch (ev.k) {
                    case event_spec::kind::norm_threshold:
                        value = norm_gamma(u, ev.gamma, p);
                        hit = value >= ev.threshold;
                        break;
                    case event_spec::kind::dt_floor:
                        // Landing steps are shortened by geometry, not the
                        // controller; gauge the controller's preference.
                        value = landed ? std::min(dt_ctrl, rs.dt_max) : dt_try;
                        hit = value < ev.threshold;
                        break;
                    case event_spec::kind::tail_fraction:
                        value = tail_fraction(u, ev.gamma, p, ev.width);
                        hit = value > ev.threshold;
                        break;
                }
                if (hit) {
                    tr.events.push_back(event_hit{t, ev, value});
                    stopped = true;
                }
            }
            if (stopped) {
                tr.status = run_status::event_stop;
                break;
            }

            const double dt_next = dt_try * grow_factor(err);
            dt_ctrl = landed ? std::max(dt_next, dt_ctrl) : dt_next;
        } else {
            ++tr.n_rejected;
            if (at_floor) {
                tr.status = run_status::step_floor;
                break;
            }
            dt_ctrl = dt_try * shrink_factor(err);
        }
    }

    push_sample(t, u);
    return tr;
}

double positivity_floor(const trajectory& tr) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : tr.samples)
        if (!s.u.empty())
            m = std::min(m, kernels::active().min_element(s.u.data(),
                                                          s.u.size()));
    return m;
}

}  // namespace dyadic
