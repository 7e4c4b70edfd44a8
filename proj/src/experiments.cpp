#include "dyadic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "dyadic/errors.hpp"
#include "dyadic/model.hpp"

namespace dyadic {

namespace {

check_result bool_check(const char* name, bool ok, std::string detail = {}) {
    check_result r;
    r.name = name;
    r.lhs = ok ? 0.0 : 1.0;
    r.rhs = 0.0;
    r.ok = ok;
    r.detail = std::move(detail);
    return r;
}

std::vector<int> resolve_levels(const experiment_plan& plan, bool ascending) {
    std::vector<int> levels =
        plan.n_list.empty() ? std::vector<int>{plan.params.n_modes}
                            : plan.n_list;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1)
            throw range_error("truncation levels must be positive");
        if (ascending && i > 0 && levels[i] <= levels[i - 1])
            throw range_error(
                "truncation levels must be strictly increasing");
    }
    return levels;
}

model_params params_for_level(const experiment_plan& plan, int n) {
    model_params p = plan.params;
    for (std::size_t i = static_cast<std::size_t>(n); i < p.force.size(); ++i)
        if (p.force[i] != 0.0)
            throw range_error("force extends past the truncation");
    p.n_modes = n;
    if (!p.force.empty()) p.force.resize(static_cast<std::size_t>(n), 0.0);
    p.validate();
    return p;
}

std::vector<double> initial_for(const experiment_plan& plan,
                                const model_params& p,
                                const constant_set& consts) {
    if (plan.init.empty()) return default_initial_state(plan, p, consts);
    if (plan.init.size() > static_cast<std::size_t>(p.n_modes))
        throw range_error("initial data is longer than the truncation");
    std::vector<double> u = plan.init;
    u.resize(static_cast<std::size_t>(p.n_modes), 0.0);
    return u;
}

/// Horizon and growth figures when the threshold constants are unavailable;
/// the comparison verdicts stay at their vacuous defaults.
blowup_entry scan_only_entry(const trajectory& tr, const model_params& p,
                             double gamma, double tail_tol, int tail_width) {
    blowup_entry e;
    e.n_modes = p.n_modes;
    e.status = tr.status;
    e.min_h_over_y = std::numeric_limits<double>::quiet_NaN();
    e.horizon = tr.samples.empty() ? 0.0 : tr.samples.back().t;
    for (const state& s : tr.samples) {
        if (tail_fraction(s.u, gamma, p, tail_width) > tail_tol) {
            e.horizon = s.t;
            break;
        }
    }
    for (const state& s : tr.samples) {
        if (s.t > e.horizon) break;
        e.max_norm_third =
            std::max(e.max_norm_third, norm_gamma(s.u, 1.0 / 3.0 + gamma, p));
    }
    e.horizon_from_event = std::any_of(
        tr.events.begin(), tr.events.end(), [](const event_hit& ev) {
            return ev.spec.k == event_spec::kind::tail_fraction;
        });
    return e;
}

void run_blowup(run_artifact& art, const experiment_plan& plan) {
    const std::vector<int> levels = resolve_levels(plan, true);
    blowup_report rep;
    rep.consts = art.consts;

    for (int n : levels) {
        const model_params p = params_for_level(plan, n);
        const std::vector<double> u0 = initial_for(plan, p, art.consts);
        if (art.runs.empty()) {
            rep.initial_norm_gamma = norm_gamma(u0, plan.gamma, p);
            rep.margin = rep.initial_norm_gamma / art.consts.m_gamma;
            if (!art.consts.gamma_range_valid) {
                rep.valid = false;
                rep.invalid_reason =
                    "gamma is outside the admissible window (0, 1 - 3*alpha)";
            } else if (!(rep.margin > 1.0)) {
                rep.valid = false;
                rep.invalid_reason =
                    "initial norm does not clear the threshold m_gamma";
            } else {
                rep.valid = true;
            }
        }

        stepper_config cfg = plan.stepper;
        // The front crosses ever-faster scales, so the generic relative step
        // floor would end the run long before the tail fills; give the
        // controller the whole positive range instead.
        if (cfg.dt_min == 0.0) cfg.dt_min = 1e-300;

        std::vector<event_spec> events = plan.events;
        event_spec tail;
        tail.k = event_spec::kind::tail_fraction;
        tail.threshold = plan.tail_tol;
        tail.gamma = plan.gamma;
        tail.width = plan.tail_width;
        events.push_back(tail);

        trajectory tr = integrate(state{0.0, u0}, plan.t_end, p, cfg, events,
                                  plan.sample_every);
        art.records.push_back(annotate(tr, p, art.consts, plan.tail_width));
        rep.per_n.push_back(
            rep.valid ? blowup_monitor(tr, p, art.consts, plan.tail_tol,
                                       plan.tail_width)
                      : scan_only_entry(tr, p, plan.gamma, plan.tail_tol,
                                        plan.tail_width));
        art.n_levels.push_back(n);
        art.runs.push_back(std::move(tr));
    }

    int bad_monotone = 0, bad_domination = 0, bad_integral = 0, bad_order = 0;
    for (std::size_t i = 0; i < rep.per_n.size(); ++i) {
        const blowup_entry& e = rep.per_n[i];
        rep.h_monotone_ok = rep.h_monotone_ok && e.h_monotone_ok;
        rep.domination_ok = rep.domination_ok && e.domination_ok;
        bad_monotone += e.h_monotone_ok ? 0 : 1;
        bad_domination += e.domination_ok ? 0 : 1;
        bad_integral += e.integral_ok ? 0 : 1;
        if (i > 0) {
            const blowup_entry& prev = rep.per_n[i - 1];
            const double slack =
                plan.sample_every + 1e-6 * std::fabs(prev.horizon) + 1e-12;
            if (e.horizon < prev.horizon - slack) {
                rep.horizon_monotone_ok = false;
                ++bad_order;
            }
            rep.norm_growth_ratios.push_back(
                e.max_norm_third /
                std::max(prev.max_norm_third, 1e-300));
        }
    }

    if (rep.valid) {
        art.asserted.push_back(bool_check(
            "blowup_h_monotone", bad_monotone == 0,
            "H nondecreasing above the threshold on every level"));
        art.asserted.push_back(
            bool_check("blowup_domination", bad_domination == 0,
                       "H stays above the comparison curve"));
        art.asserted.push_back(
            bool_check("blowup_integral", bad_integral == 0,
                       "quadrature of c*H^(3/2) fits the measured gain"));
        art.asserted.push_back(
            bool_check("blowup_horizon_monotone", bad_order == 0,
                       "horizon does not shrink with refinement"));
    }
    art.blowup = std::move(rep);
}

void run_regularity(run_artifact& art, const experiment_plan& plan) {
    const model_params& base = plan.params;
    if (!(base.alpha > 1.0 / 3.0) || base.alpha > 1.0)
        throw range_error("regularity study needs alpha in (1/3, 1]");
    if (!(base.nu > 0.0))
        throw range_error("regularity study needs positive viscosity");
    const std::vector<int> levels = resolve_levels(plan, true);

    const double lam = base.lambda;
    const double alpha = base.alpha;
    const double theta = (1.0 - alpha) / (2.0 * alpha);
    const double c_b = std::pow(lam, 1.0 + alpha) - std::pow(lam, 1.0 - alpha);
    const double young_c = (1.0 - theta) *
                           std::pow(c_b, 1.0 / (1.0 - theta)) *
                           std::pow(3.0 * theta / base.nu,
                                    theta / (1.0 - theta));
    const double q = (8.0 * alpha - 2.0) / (3.0 * alpha - 1.0);

    regularity_summary sum;
    sum.n_levels = levels;
    int bad_intervals = 0;

    for (int n : levels) {
        const model_params p = params_for_level(plan, n);
        const std::vector<double> u0 = initial_for(plan, p, art.consts);
        trajectory tr = integrate(state{0.0, u0}, plan.t_end, p, plan.stepper,
                                  plan.events, plan.sample_every);
        std::vector<diagnostics_record> recs =
            annotate(tr, p, art.consts, plan.tail_width);

        const double g2 = p.force_norm() * p.force_norm();
        const std::size_t m = tr.samples.size();
        std::vector<double> rhs(m);
        double sup_ens2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double au2 =
                geometric_power_sum(tr.samples[i].u.data(),
                                    tr.samples[i].u.size(), lam, 4.0 * alpha,
                                    2)
                    .to_double("dissipation image");
            rhs[i] = -(2.0 * p.nu / 3.0) * au2 +
                     2.0 * young_c * std::pow(recs[i].enstrophy, q) +
                     (3.0 / (2.0 * p.nu)) * g2;
            sup_ens2 = std::max(sup_ens2,
                                recs[i].enstrophy * recs[i].enstrophy);
        }
        const double scale = std::max(sup_ens2, 1e-300);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const double dt = tr.samples[i + 1].t - tr.samples[i].t;
            const double lhs = recs[i + 1].enstrophy * recs[i + 1].enstrophy -
                               recs[i].enstrophy * recs[i].enstrophy;
            const double bound = 0.5 * dt * (rhs[i] + rhs[i + 1]);
            const double excess = (lhs - bound) / scale;
            sum.max_ledger_excess = std::max(sum.max_ledger_excess, excess);
            if (excess > 1e-7) {
                sum.ledger_ok = false;
                ++bad_intervals;
            }
        }
        sum.sup_enstrophy.push_back(std::sqrt(sup_ens2));
        for (const diagnostics_record& r : recs)
            sum.sup_energy_sq = std::max(sum.sup_energy_sq,
                                         r.energy * r.energy);

        art.n_levels.push_back(n);
        art.records.push_back(std::move(recs));
        art.runs.push_back(std::move(tr));
    }

    for (std::size_t i = 1; i < sum.sup_enstrophy.size(); ++i) {
        const double drift =
            std::fabs(sum.sup_enstrophy[i] - sum.sup_enstrophy[i - 1]) /
            std::max(sum.sup_enstrophy[i - 1], 1e-300);
        sum.max_drift = std::max(sum.max_drift, drift);
    }
    if (base.alpha >= 0.5) {
        const model_params deepest = params_for_level(plan, levels.back());
        sum.energy_equality =
            energy_equality_residual(art.runs.back(), deepest);
    }

    art.asserted.push_back(bool_check(
        "regularity_ledger", bad_intervals == 0,
        "every interval satisfies the integrated dissipation bound"));
    art.regularity = std::move(sum);
}

void run_attractor(run_artifact& art, const experiment_plan& plan) {
    const model_params& base = plan.params;
    if (!(base.nu > 0.0))
        throw range_error("attractor probe needs positive viscosity");
    if (plan.t_end * base.nu < 10.0 * (1.0 - 1e-12))
        throw range_error("attractor probe needs t_end >= 10 / nu");
    const std::vector<int> levels = resolve_levels(plan, false);

    attractor_summary sum;
    for (int n : levels) {
        const model_params p = params_for_level(plan, n);
        const std::vector<double> u0 = initial_for(plan, p, art.consts);
        trajectory tr = integrate(state{0.0, u0}, plan.t_end, p, plan.stepper,
                                  plan.events, plan.sample_every);
        std::vector<diagnostics_record> recs =
            annotate(tr, p, art.consts, plan.tail_width);

        const double fn = p.force_norm();
        // With zero force the ball degenerates to the origin; probe decay
        // down to a small multiple of the initial magnitude instead.
        sum.radius = fn > 0.0 ? 1.01 * fn / p.nu
                              : 1e-5 * energy_norm(u0);
        sum.entered = false;
        sum.resided = false;
        sum.entry_time = -1.0;
        sum.max_after_entry = 0.0;
        sum.post_entry_sup_third = 0.0;
        bool left_after_entry = false;
        for (const diagnostics_record& r : recs) {
            if (!sum.entered) {
                if (r.energy <= sum.radius) {
                    sum.entered = true;
                    sum.entry_time = r.t;
                }
            }
            if (sum.entered) {
                sum.max_after_entry = std::max(sum.max_after_entry, r.energy);
                sum.post_entry_sup_third =
                    std::max(sum.post_entry_sup_third, r.norm_third);
                if (r.energy > sum.radius * (1.0 + 1e-12))
                    left_after_entry = true;
            }
        }
        sum.resided = sum.entered && !left_after_entry;

        art.n_levels.push_back(n);
        art.records.push_back(std::move(recs));
        art.runs.push_back(std::move(tr));
    }

    art.asserted.push_back(bool_check("attractor_entered", sum.entered,
                                      "the run reaches the absorbing ball"));
    art.asserted.push_back(bool_check(
        "attractor_resided", sum.resided,
        "the run never leaves the ball after first entry"));
    art.attractor = std::move(sum);
}

std::vector<double> make_sweep_vector(std::uint64_t index,
                                      std::mt19937_64& rng,
                                      const model_params& p) {
    const int n = p.n_modes;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    switch (index % 5) {
        case 0:
            for (double& x : u) x = unit(rng);
            break;
        case 1: {  // spectrally decaying with jitter
            const double rate = p.alpha + 0.5;
            for (int i = 0; i < n; ++i)
                u[i] = 0.5 * unit(rng) *
                       std::pow(p.lambda, -rate * (i + 1));
            break;
        }
        case 2:
            for (double& x : u) x = sym(rng);
            break;
        case 3: {  // sparse signed spikes
            std::uniform_int_distribution<int> pick(0, n - 1);
            for (int k = 0; k < 3; ++k) u[pick(rng)] = sym(rng);
            break;
        }
        default: {  // adjacent pair near the flux-bound optimum
            std::uniform_int_distribution<int> pick(0, std::max(0, n - 2));
            std::uniform_real_distribution<double> amp(0.5, 2.0);
            const int k = pick(rng);
            const double a = amp(rng);
            u[k] = a;
            if (k + 1 < n) u[k + 1] = a * std::pow(p.lambda, -p.alpha);
            break;
        }
    }
    return u;
}

}  // namespace

bool run_artifact::all_asserted_ok() const {
    return std::all_of(asserted.begin(), asserted.end(),
                       [](const check_result& c) { return c.ok || c.skipped; });
}

std::vector<double> default_initial_state(const experiment_plan& plan,
                                          const model_params& p,
                                          const constant_set& consts) {
    switch (plan.kind) {
        case experiment_kind::blowup:
            if (consts.gamma_range_valid && std::isfinite(consts.m_gamma) &&
                consts.m_gamma > 0.0) {
                // Twice the threshold magnitude, placed in the first mode:
                // ||u(0)||_gamma = 2 m_gamma.
                return unit_mode(p.n_modes, 1,
                                 2.0 * consts.m_gamma *
                                     std::pow(p.lambda, -plan.gamma));
            }
            return unit_mode(p.n_modes, 1);
        case experiment_kind::attractor: {
            const double fn = p.force_norm();
            if (p.nu > 0.0 && fn > 0.0)
                return unit_mode(p.n_modes, 1, 2.02 * fn / p.nu);
            return unit_mode(p.n_modes, 1);
        }
        default:
            return unit_mode(p.n_modes, 1);
    }
}

verify_summary verify_vectors(const model_params& p,
                              const constant_set& consts,
                              std::uint64_t n_vectors, std::uint64_t seed,
                              std::size_t max_failures) {
    p.validate();
    verify_summary sum;
    sum.n_vectors = n_vectors;
    if (n_vectors == 0) {
        sum.vacuous = true;
        return sum;
    }
    std::mt19937_64 rng(seed);
    for (std::uint64_t i = 0; i < n_vectors; ++i) {
        const std::vector<double> u = make_sweep_vector(i, rng, p);
        for (check_result& c : inequality_suite(u, p, consts)) {
            ++sum.n_checks;
            if (c.skipped) {
                ++sum.n_skipped;
            } else if (!c.ok) {
                ++sum.n_failures;
                if (sum.failures.size() < max_failures)
                    sum.failures.push_back(
                        verify_failure{i, std::move(c), u});
            }
        }
    }
    return sum;
}

run_artifact run_experiment(const experiment_plan& plan) {
    plan.params.validate();
    if (!std::isfinite(plan.gamma) || !(plan.gamma > 0.0))
        throw range_error("gamma must be positive");
    if (plan.kind != experiment_kind::verify &&
        (!std::isfinite(plan.t_end) || !(plan.t_end > 0.0)))
        throw range_error("t_end must be positive");
    if (plan.tail_width < 1)
        throw range_error("tail width must be at least one mode");

    run_artifact art;
    art.plan = plan;
    art.consts = constants(plan.params, plan.gamma);

    switch (plan.kind) {
        case experiment_kind::blowup:
            run_blowup(art, plan);
            break;
        case experiment_kind::regularity:
            run_regularity(art, plan);
            break;
        case experiment_kind::attractor:
            run_attractor(art, plan);
            break;
        case experiment_kind::verify: {
            verify_summary sum = verify_vectors(
                plan.params, art.consts, plan.n_vectors, plan.seed);
            art.asserted.push_back(bool_check(
                "verify_identities", sum.n_failures == 0,
                sum.vacuous ? "warning: no vectors were checked"
                            : "identity sweep over random vectors"));
            art.verify = std::move(sum);
            break;
        }
        case experiment_kind::simulate:
            for (int n : resolve_levels(plan, false)) {
                const model_params p = params_for_level(plan, n);
                const std::vector<double> u0 =
                    initial_for(plan, p, art.consts);
                trajectory tr = integrate(state{0.0, u0}, plan.t_end, p,
                                          plan.stepper, plan.events,
                                          plan.sample_every);
                art.records.push_back(
                    annotate(tr, p, art.consts, plan.tail_width));
                art.n_levels.push_back(n);
                art.runs.push_back(std::move(tr));
            }
            break;
    }
    return art;
}

}  // namespace dyadic
