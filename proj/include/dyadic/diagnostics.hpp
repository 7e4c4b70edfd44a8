#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyadic/constants.hpp"
#include "dyadic/integrator.hpp"
#include "dyadic/params.hpp"

namespace dyadic {

/// Per-sample observables written to the time series output.
struct diagnostics_record {
    double t = 0.0;
    double energy = 0.0;          ///< |u|
    double enstrophy = 0.0;       ///< ||u||_alpha
    double norm_gamma_sq = 0.0;   ///< ||u||_gamma^2
    double norm_third = 0.0;      ///< ||u||_{1/3+gamma}
    std::optional<double> h_value;        ///< H(u); needs a valid gamma range
    std::optional<double> riccati_value;  ///< y(t); absent past t_star or for
                                          ///< studies without a margin
    double min_mode = 0.0;
    double tail_fraction = 0.0;
    double energy_budget_residual = 0.0;  ///< over the preceding interval
};

/// Solution of dy/dt = c y^(3/2), y(0) = y0 > 0, which blows up at
/// t_star = 2 / (c sqrt(y0)).
struct riccati_bound {
    double y0 = 0.0;
    double c = 0.0;
    double t_star = 0.0;

    /// y(t) = (y0^(-1/2) - c t / 2)^(-2); monotone increasing on [0, t_star).
    /// Throws past_singularity_error for t >= t_star, range_error for t < 0.
    double eval(double t) const;
};

/// Comparison curve seeded from an initial Lyapunov value: y0 = h0 / 2.
riccati_bound riccati_from_h0(double h0, double c);

/// Least-squares fit of 1 / ||u(t)||_gamma^2 ~ (t_star - t) / c over the
/// trailing `window` samples (window >= 8).  Requires the squared norm to be
/// strictly increasing over the window; otherwise throws fit_rejected_error.
struct growth_fit_result {
    double t_star = 0.0;
    double c = 0.0;
    double quality = 0.0;  ///< normalized RMS residual of the linear fit
};
growth_fit_result growth_fit(const trajectory& tr, const model_params& p,
                             double gamma, int window);

/// Compute a record per sample.  `consts` supplies gamma and (when its range
/// is valid) the Lyapunov weight c2; the Riccati curve is attached only when
/// the initial norm clears the threshold m_gamma.  The budget residual of
/// record i covers [t_{i-1}, t_i] with composite-trapezoid quadrature.
std::vector<diagnostics_record> annotate(const trajectory& tr,
                                         const model_params& p,
                                         const constant_set& consts,
                                         int tail_width = 5);

/// Energy-balance residuals r_i = |u(t_{i+1})|^2 - |u(t_i)|^2
///   + 2 nu int ||u||_alpha^2 - 2 int (g, u)  (trapezoid per interval).
std::vector<double> energy_budget(const trajectory& tr, const model_params& p);

/// Largest |r| of the energy budget over all sample pairs (not just
/// consecutive ones).
double energy_equality_residual(const trajectory& tr, const model_params& p);

/// Largest violation of the decay envelope
///   |u(t)|^2 <= e^(-nu (t-t0)) |u(t0)|^2 + (|g|/nu)^2 (1 - e^(-nu (t-t0)))
/// over the samples, normalized by the envelope (<= 0 when it holds; for
/// nu = 0 the linear-in-time envelope (|u(t0)| + (t-t0)|g|)^2 is used).
double gronwall_excess(const trajectory& tr, const model_params& p);

/// One named exact-arithmetic check.  `lhs <= rhs` up to the check's own
/// slack defines ok; out-of-range checks are reported as skipped instead.
struct check_result {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
    bool skipped = false;
    std::string detail;
};

/// Pointwise and summed inequalities evaluated on one vector: cancellation of
/// the cascade term, right-hand-side consistency, dual-route flux agreement,
/// the spectral gap bound, both cascade-flux bounds, the cubic lower bound,
/// the two pointwise splitting inequalities, and the Lyapunov sandwich.
/// Checks whose parameter guard fails are returned with skipped = true.
std::vector<check_result> inequality_suite(const std::vector<double>& u,
                                           const model_params& p,
                                           const constant_set& consts);

/// How much of the cascade-flux bound a two-mode vector
/// u = e_n + ratio * e_{n+1} attains, in [0, 1].
double sharpness_probe(int n, double ratio, const model_params& p);

/// Outcome of one truncation level of a blow-up study.
struct blowup_entry {
    int n_modes = 0;
    run_status status = run_status::reached_t_end;
    double horizon = 0.0;          ///< first tail-contamination time
    bool horizon_from_event = false;
    double max_norm_third = 0.0;   ///< sup of ||u||_{1/3+gamma} up to horizon
    bool h_monotone_ok = true;     ///< H nondecreasing while H > m_gamma^2
    bool domination_ok = true;     ///< H >= y (1 - 1e-3) on the valid window
    bool integral_ok = true;       ///< c int H^(3/2) <= H(t) - H(0) + tol
    double min_h_over_y = 0.0;
};

/// Evaluate the blow-up verdicts on one trajectory.  The valid comparison
/// window ends at min(horizon, 0.95 * t_star).
blowup_entry blowup_monitor(const trajectory& tr, const model_params& p,
                            const constant_set& consts, double tail_tol,
                            int tail_width);

/// Aggregated result of a multi-truncation blow-up study.
struct blowup_report {
    constant_set consts;
    double initial_norm_gamma = 0.0;
    double margin = 0.0;  ///< initial norm / m_gamma; > 1 required
    bool valid = false;
    std::string invalid_reason;
    std::vector<blowup_entry> per_n;
    bool domination_ok = true;
    bool h_monotone_ok = true;
    bool horizon_monotone_ok = true;
    /// max_norm_third ratios between consecutive truncation levels.
    std::vector<double> norm_growth_ratios;
};

}  // namespace dyadic
