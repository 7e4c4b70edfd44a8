#include "dyadic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "dyadic/errors.hpp"
#include "dyadic/kernels.hpp"
#include "dyadic/model.hpp"

namespace dyadic {

namespace {

constexpr double k_abs_floor = 1e-300;

std::optional<std::vector<double>> try_weights(double lambda, double c, int n) {
    try {
        return geometric_weights(lambda, c, n);
    } catch (const overflow_error&) {
        return std::nullopt;
    }
}

/// Weighted squared norm with the fused fast path and the exponent-separated
/// fallback when either the weights or the accumulation leave double range.
double norm_sq(const std::vector<double>& u,
               const std::optional<std::vector<double>>& w, double lambda,
               double c, const char* what) {
    if (w) {
        double s = kernels::active().weighted_sumsq(w->data(), u.data(),
                                                    u.size());
        if (std::isfinite(s)) return s;
    }
    return geometric_power_sum(u.data(), u.size(), lambda, c, 2)
        .to_double(what);
}

double force_dot(const std::vector<double>& u, const model_params& p) {
    if (p.force.empty()) return 0.0;
    return kernels::active().weighted_dot(nullptr, u.data(), p.force.data(),
                                          u.size());
}

check_result make_check(const char* name, double lhs, double rhs,
                        std::string detail = {}) {
    check_result r;
    r.name = name;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ok = std::isfinite(lhs) && lhs <= rhs;
    r.detail = std::move(detail);
    return r;
}

check_result make_skip(const char* name, std::string reason) {
    check_result r;
    r.name = name;
    r.skipped = true;
    r.detail = std::move(reason);
    return r;
}

}  // namespace

double riccati_bound::eval(double t) const {
    if (t < 0.0) throw range_error("riccati evaluation before t = 0");
    if (!(t < t_star))
        throw past_singularity_error(
            "riccati bound evaluated at or past its singularity");
    const double base = 1.0 / std::sqrt(y0) - 0.5 * c * t;
    return 1.0 / (base * base);
}

riccati_bound riccati_from_h0(double h0, double c) {
    if (!(h0 > 0.0) || !std::isfinite(h0))
        throw range_error("riccati bound needs a positive initial value");
    if (!(c > 0.0) || !std::isfinite(c))
        throw range_error("riccati bound needs a positive coefficient");
    riccati_bound rb;
    rb.y0 = 0.5 * h0;
    rb.c = c;
    rb.t_star = 2.0 / (c * std::sqrt(rb.y0));
    return rb;
}

growth_fit_result growth_fit(const trajectory& tr, const model_params& p,
                             double gamma, int window) {
    const std::size_t m = tr.samples.size();
    if (window < 8 || m < static_cast<std::size_t>(window))
        throw fit_rejected_error("growth fit needs a window of >= 8 samples");
    const std::size_t first = m - static_cast<std::size_t>(window);

    std::vector<double> ts(window), zs(window);
    double prev_sq = -1.0;
    for (int i = 0; i < window; ++i) {
        const state& s = tr.samples[first + i];
        const double nrm = norm_gamma(s.u, gamma, p);
        const double sq = nrm * nrm;
        if (!(sq > prev_sq))
            throw fit_rejected_error(
                "growth fit needs strictly increasing norms over the window");
        prev_sq = sq;
        if (!(sq > 0.0))
            throw fit_rejected_error("growth fit needs nonzero norms");
        ts[i] = s.t;
        zs[i] = 1.0 / sq;
    }

    double t_mean = 0.0, z_mean = 0.0;
    for (int i = 0; i < window; ++i) {
        t_mean += ts[i];
        z_mean += zs[i];
    }
    t_mean /= window;
    z_mean /= window;
    double stt = 0.0, stz = 0.0;
    for (int i = 0; i < window; ++i) {
        stt += (ts[i] - t_mean) * (ts[i] - t_mean);
        stz += (ts[i] - t_mean) * (zs[i] - z_mean);
    }
    const double slope = stz / stt;
    if (!(slope < 0.0))
        throw fit_rejected_error("growth fit found a non-shrinking reciprocal");
    const double intercept = z_mean - slope * t_mean;

    double ss_res = 0.0, ss_z = 0.0;
    for (int i = 0; i < window; ++i) {
        const double fit = intercept + slope * ts[i];
        ss_res += (zs[i] - fit) * (zs[i] - fit);
        ss_z += zs[i] * zs[i];
    }

    growth_fit_result out;
    out.c = -1.0 / slope;
    out.t_star = -intercept / slope;
    out.quality = std::sqrt(ss_res / std::max(ss_z, k_abs_floor));
    return out;
}

std::vector<diagnostics_record> annotate(const trajectory& tr,
                                         const model_params& p,
                                         const constant_set& consts,
                                         int tail_width) {
    std::vector<diagnostics_record> out;
    if (tr.samples.empty()) return out;
    const std::size_t n = p.n_modes;
    if (tr.samples.front().u.size() != n)
        throw dimension_error("trajectory does not match the mode count");

    const double gamma = consts.gamma;
    const auto wg = try_weights(p.lambda, 2.0 * gamma, p.n_modes);
    const auto wa = try_weights(p.lambda, 2.0 * p.alpha, p.n_modes);
    const auto wt = try_weights(p.lambda, 2.0 * (1.0 / 3.0 + gamma),
                                p.n_modes);
    const auto& k = kernels::active();
    const bool with_h = consts.gamma_range_valid && std::isfinite(consts.c2);

    out.reserve(tr.samples.size());
    double e2_prev = 0.0, a2_prev = 0.0, gd_prev = 0.0;
    for (const state& s : tr.samples) {
        diagnostics_record r;
        r.t = s.t;
        const double e2 = norm_sq(s.u, std::nullopt, p.lambda, 0.0, "energy");
        const double a2 =
            norm_sq(s.u, wa, p.lambda, 2.0 * p.alpha, "dissipation norm");
        const double g2 =
            norm_sq(s.u, wg, p.lambda, 2.0 * gamma, "weighted norm");
        const double t2 = norm_sq(s.u, wt, p.lambda,
                                  2.0 * (1.0 / 3.0 + gamma), "growth norm");
        r.energy = std::sqrt(e2);
        r.enstrophy = std::sqrt(a2);
        r.norm_gamma_sq = g2;
        r.norm_third = std::sqrt(t2);
        r.min_mode = k.min_element(s.u.data(), n);
        r.tail_fraction = tail_fraction(s.u, gamma, p, tail_width);
        if (with_h) {
            double h = std::numeric_limits<double>::quiet_NaN();
            if (wg && n >= 2) {
                h = g2 + consts.c2 * k.weighted_dot(wg->data(), s.u.data(),
                                                    s.u.data() + 1, n - 1);
            }
            if (!std::isfinite(h)) h = lyapunov_h(s.u, gamma, consts.c2, p);
            r.h_value = h;
        }
        const double gd = force_dot(s.u, p);
        if (!out.empty()) {
            const double dt = s.t - out.back().t;
            r.energy_budget_residual = e2 - e2_prev +
                                       p.nu * dt * (a2 + a2_prev) -
                                       dt * (gd + gd_prev);
        }
        e2_prev = e2;
        a2_prev = a2;
        gd_prev = gd;
        out.push_back(std::move(r));
    }

    // Attach the comparison curve when the run starts above the threshold.
    if (with_h && std::isfinite(consts.m_gamma) && consts.m_gamma > 0.0 &&
        out.front().h_value) {
        const double margin =
            std::sqrt(out.front().norm_gamma_sq) / consts.m_gamma;
        const double h0 = *out.front().h_value;
        if (margin > 1.0 && h0 > 0.0 && consts.c_riccati > 0.0) {
            const riccati_bound rb = riccati_from_h0(h0, consts.c_riccati);
            const double t0 = out.front().t;
            for (diagnostics_record& r : out) {
                const double dt = r.t - t0;
                if (dt >= 0.0 && dt < rb.t_star) r.riccati_value = rb.eval(dt);
            }
        }
    }
    return out;
}

std::vector<double> energy_budget(const trajectory& tr,
                                  const model_params& p) {
    std::vector<double> res;
    if (tr.samples.size() < 2) return res;
    const auto wa = try_weights(p.lambda, 2.0 * p.alpha, p.n_modes);
    res.reserve(tr.samples.size() - 1);
    double e2_prev = 0.0, a2_prev = 0.0, gd_prev = 0.0, t_prev = 0.0;
    bool have_prev = false;
    for (const state& s : tr.samples) {
        const double e2 = norm_sq(s.u, std::nullopt, p.lambda, 0.0, "energy");
        const double a2 =
            norm_sq(s.u, wa, p.lambda, 2.0 * p.alpha, "dissipation norm");
        const double gd = force_dot(s.u, p);
        if (have_prev) {
            const double dt = s.t - t_prev;
            res.push_back(e2 - e2_prev + p.nu * dt * (a2 + a2_prev) -
                          dt * (gd + gd_prev));
        }
        e2_prev = e2;
        a2_prev = a2;
        gd_prev = gd;
        t_prev = s.t;
        have_prev = true;
    }
    return res;
}

double energy_equality_residual(const trajectory& tr, const model_params& p) {
    if (tr.samples.size() < 2) return 0.0;
    const auto wa = try_weights(p.lambda, 2.0 * p.alpha, p.n_modes);
    double acc = 0.0;  // running 2*nu*int ||u||^2 - 2*int (g,u)
    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    double a2_prev = 0.0, gd_prev = 0.0, t_prev = 0.0;
    bool have_prev = false;
    for (const state& s : tr.samples) {
        const double e2 = norm_sq(s.u, std::nullopt, p.lambda, 0.0, "energy");
        const double a2 =
            norm_sq(s.u, wa, p.lambda, 2.0 * p.alpha, "dissipation norm");
        const double gd = force_dot(s.u, p);
        if (have_prev) {
            const double dt = s.t - t_prev;
            acc += p.nu * dt * (a2 + a2_prev) - dt * (gd + gd_prev);
        }
        const double c = e2 + acc;
        c_min = std::min(c_min, c);
        c_max = std::max(c_max, c);
        a2_prev = a2;
        gd_prev = gd;
        t_prev = s.t;
        have_prev = true;
    }
    return c_max - c_min;
}

double gronwall_excess(const trajectory& tr, const model_params& p) {
    if (tr.samples.empty()) return 0.0;
    const double gn = p.force_norm();
    const double t0 = tr.samples.front().t;
    const double e2_0 =
        norm_sq(tr.samples.front().u, std::nullopt, p.lambda, 0.0, "energy");
    double worst = -std::numeric_limits<double>::infinity();
    for (const state& s : tr.samples) {
        const double dt = s.t - t0;
        double env;
        if (p.nu > 0.0) {
            const double decay = std::exp(-p.nu * dt);
            const double floor = gn / p.nu;
            env = decay * e2_0 + floor * floor * (1.0 - decay);
        } else {
            const double lin = std::sqrt(e2_0) + dt * gn;
            env = lin * lin;
        }
        const double e2 = norm_sq(s.u, std::nullopt, p.lambda, 0.0, "energy");
        worst = std::max(worst, (e2 - env) / std::max(env, k_abs_floor));
    }
    return worst;
}

std::vector<check_result> inequality_suite(const std::vector<double>& u,
                                           const model_params& p,
                                           const constant_set& consts) {
    if (u.size() != static_cast<std::size_t>(p.n_modes))
        throw dimension_error("vector does not match the mode count");
    const std::size_t n = u.size();
    const double lam = p.lambda;
    const double gamma = consts.gamma;
    const auto& k = kernels::active();
    std::vector<check_result> out;

    std::vector<double> abs_u(u.size());
    std::transform(u.begin(), u.end(), abs_u.begin(),
                   [](double x) { return std::fabs(x); });

    // Cancellation of the cascade term against the solution itself.
    {
        const std::vector<double> b = bilinear(u, u, p);
        double sum = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += b[i] * u[i];
            scale += std::fabs(b[i] * u[i]);
        }
        out.push_back(
            make_check("orthogonality_cascade", std::fabs(sum), 1e-12 * scale));
    }

    // g - nu*A u - B(u,u) must reproduce the assembled right-hand side.
    {
        const std::vector<double> rhs = galerkin_rhs(state{0.0, u}, p);
        const std::vector<double> au = apply_dissipation(u, p);
        const std::vector<double> b = bilinear(u, u, p);
        double viol = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g_i = p.force_at(static_cast<int>(i) + 1);
            const double resid = rhs[i] + p.nu * au[i] + b[i] - g_i;
            // The two cascade products can nearly cancel inside b[i]; scale
            // by the pre-cancellation magnitudes so the tolerance reflects
            // the conditioning of the recombination.
            const double m = static_cast<double>(i) + 1.0;
            const double t_down =
                i > 0 ? std::pow(p.lambda, m) * u[i - 1] * u[i - 1] : 0.0;
            const double t_up = i + 1 < n ? std::pow(p.lambda, m + 1.0) *
                                                u[i] * u[i + 1]
                                          : 0.0;
            const double scale =
                std::max({std::fabs(rhs[i]), std::fabs(p.nu * au[i]),
                          std::fabs(t_down), std::fabs(t_up), std::fabs(g_i)});
            if (resid != 0.0)
                viol = std::max(viol,
                                std::fabs(resid) / std::max(scale, k_abs_floor));
        }
        out.push_back(make_check("rhs_consistency", viol, 1e-13));
    }

    // Telescoped and inner-product routes to the two flux functionals.  Both
    // sums cancel heavily on sign-mixed data, so the agreement tolerance is
    // scaled by the summed term magnitudes, not the (possibly tiny) value.
    {
        double terms = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double m = static_cast<double>(i) + 1.0;
            terms += std::pow(lam, m + 1.0) *
                     (std::pow(lam, 2.0 * p.alpha * (m + 1.0)) -
                      std::pow(lam, 2.0 * p.alpha * m)) *
                     u[i] * u[i] * std::fabs(u[i + 1]);
        }
        const double a = flux_enstrophy(u, p);
        const double d = flux_enstrophy_direct(u, p);
        const double scale = std::max({std::fabs(a), std::fabs(d), terms});
        out.push_back(make_check("dissipation_flux_routes", std::fabs(a - d),
                                 1e-12 * scale));
    }
    double gamma_terms = 0.0;  // shared magnitude scale of the gamma flux
    for (std::size_t i = 0; i + 1 < n; ++i)
        gamma_terms += std::pow(lam, (1.0 + 2.0 * gamma) *
                                         (static_cast<double>(i) + 1.0)) *
                       u[i] * u[i] * std::fabs(u[i + 1]);
    {
        const double a = flux_gamma(u, gamma, p);
        const double d = flux_gamma_direct(u, gamma, p);
        const double scale = std::max(
            {std::fabs(a), std::fabs(d),
             std::fabs(lam * lam - lam) * gamma_terms});
        out.push_back(make_check("weighted_flux_routes", std::fabs(a - d),
                                 1e-12 * scale));
    }

    // Weighted-flux expansion using the externally supplied coefficient c1.
    if (std::isfinite(consts.c1)) {
        double expansion;
        bool have = false;
        if (auto w = try_weights(lam, 1.0 + 2.0 * gamma, p.n_modes)) {
            expansion = -consts.c1 * k.weighted_triple(w->data(), u.data(), n);
            have = std::isfinite(expansion);
        }
        if (!have) {
            out.push_back(
                make_skip("weighted_flux_constant", "weights out of range"));
        } else {
            const double d = flux_gamma_direct(u, gamma, p);
            const double scale =
                std::max({std::fabs(expansion), std::fabs(d),
                          std::fabs(consts.c1) * gamma_terms});
            out.push_back(make_check("weighted_flux_constant",
                                     std::fabs(expansion - d), 1e-12 * scale));
        }
    } else {
        out.push_back(make_skip("weighted_flux_constant", "c1 not available"));
    }

    const double e2 = norm_sq(u, std::nullopt, lam, 0.0, "energy");
    const double ens = enstrophy_norm(u, p);

    // |u|^2 <= lambda^(-2*alpha) ||u||_alpha^2 (lowest-mode spectral gap).
    out.push_back(make_check(
        "spectral_gap", e2,
        std::pow(lam, -2.0 * p.alpha) * ens * ens * (1.0 + 1e-12) +
            k_abs_floor));

    // |<B(u,u), A u>| <= c_b * ||u||_alpha * sum lambda^((1+alpha)n) u_n^2.
    const double c_b = std::pow(lam, 1.0 + p.alpha) -
                       std::pow(lam, 1.0 - p.alpha);
    {
        const double flux = std::fabs(flux_enstrophy(u, p));
        const double s =
            geometric_power_sum(u.data(), n, lam, 1.0 + p.alpha, 2)
                .to_double("flux bound sum");
        out.push_back(make_check("cascade_flux_bound", flux,
                                 c_b * ens * s * (1.0 + 1e-12) + k_abs_floor));
    }

    // Interpolated form
    //   |<B(u,u), A u>| <= c_b |Au|^(1/alpha - 1) ||u||_alpha^(4 - 1/alpha):
    // one cascade factor bounded in sup-norm, the remaining pair split
    // between |Au| and ||u||_alpha so the spectral weights balance exactly.
    if (p.alpha >= 1.0 / 3.0 && p.alpha <= 1.0) {
        const double flux = std::fabs(flux_enstrophy(u, p));
        const double au2 = geometric_power_sum(u.data(), n, lam,
                                               4.0 * p.alpha, 2)
                               .to_double("dissipation image");
        const double p1 = 1.0 / p.alpha - 1.0;
        const double p2 = 4.0 - 1.0 / p.alpha;
        const double rhs =
            c_b * std::pow(std::sqrt(au2), p1) * std::pow(ens, p2);
        out.push_back(make_check("cascade_flux_interpolated", flux,
                                 rhs * (1.0 + 1e-12) + k_abs_floor));
    } else {
        out.push_back(make_skip("cascade_flux_interpolated",
                                "needs alpha in [1/3, 1]"));
    }

    // a_gamma * ||u||_{alpha+gamma}^3 <= sum lambda^((1+2*gamma)n) |u_n|^3.
    if (consts.gamma_range_valid && std::isfinite(consts.a_gamma)) {
        const double nrm = norm_gamma(u, p.alpha + gamma, p);
        const double cubic = cubic_weighted_sum(u, gamma, p);
        out.push_back(make_check("cubic_sum_lower_bound",
                                 consts.a_gamma * nrm * nrm * nrm,
                                 cubic * (1.0 + 1e-12) + k_abs_floor));
    } else {
        out.push_back(make_skip("cubic_sum_lower_bound",
                                "needs 0 < gamma < 1 - 3*alpha"));
    }

    // Pointwise splittings used by the Lyapunov drift estimate (on |u|).
    {
        double viol = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = abs_u[i], b = abs_u[i + 1];
            const double lhs = a * b * b;
            const double rhs = 0.5 * b * b * b + 2.0 * a * a * b;
            viol = std::max(viol, (lhs - rhs) / std::max(rhs, k_abs_floor));
        }
        out.push_back(make_check("pointwise_pair_split", viol, 1e-12));
    }
    {
        double viol = 0.0;
        for (std::size_t i = 0; i + 2 < n; ++i) {
            const double a = abs_u[i], b = abs_u[i + 1], c = abs_u[i + 2];
            const double lhs = a * b * c;
            const double rhs =
                0.5 * a * a * b + 0.25 * c * c * c + b * b * c;
            viol = std::max(viol, (lhs - rhs) / std::max(rhs, k_abs_floor));
        }
        out.push_back(make_check("pointwise_triple_split", viol, 1e-12));
    }

    // ||u||_gamma^2 <= H(|u|) <= (1 + c2) ||u||_gamma^2.
    if (std::isfinite(consts.c2)) {
        const double nrm = norm_gamma(abs_u, gamma, p);
        const double sq = nrm * nrm;
        const double h = lyapunov_h(abs_u, gamma, consts.c2, p);
        const double scale = std::max(sq, k_abs_floor);
        const double viol = std::max((sq - h) / scale,
                                     (h - (1.0 + consts.c2) * sq) / scale);
        out.push_back(make_check("lyapunov_sandwich", viol, 1e-12));
    } else {
        out.push_back(make_skip("lyapunov_sandwich", "needs gamma > 0"));
    }

    return out;
}

double sharpness_probe(int n, double ratio, const model_params& p) {
    if (n < 1 || n + 1 > p.n_modes)
        throw range_error("probe mode must leave room for its neighbour");
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw range_error("probe ratio must be positive");
    std::vector<double> u(p.n_modes, 0.0);
    u[n - 1] = 1.0;
    u[n] = ratio;
    const double c_b = std::pow(p.lambda, 1.0 + p.alpha) -
                       std::pow(p.lambda, 1.0 - p.alpha);
    const double s =
        geometric_power_sum(u.data(), u.size(), p.lambda, 1.0 + p.alpha, 2)
            .to_double("flux bound sum");
    const double bound = c_b * enstrophy_norm(u, p) * s;
    return std::fabs(flux_enstrophy(u, p)) / bound;
}

blowup_entry blowup_monitor(const trajectory& tr, const model_params& p,
                            const constant_set& consts, double tail_tol,
                            int tail_width) {
    if (!consts.gamma_range_valid || !std::isfinite(consts.m_gamma))
        throw range_error("blow-up monitor needs an admissible gamma");
    if (tr.samples.empty())
        throw range_error("blow-up monitor needs a nonempty trajectory");

    blowup_entry e;
    e.n_modes = p.n_modes;
    e.status = tr.status;
    const double gamma = consts.gamma;

    const std::size_t m = tr.samples.size();
    std::vector<double> hs(m), tails(m), thirds(m);
    for (std::size_t i = 0; i < m; ++i) {
        const state& s = tr.samples[i];
        hs[i] = lyapunov_h(s.u, gamma, consts.c2, p);
        tails[i] = tail_fraction(s.u, gamma, p, tail_width);
        thirds[i] = norm_gamma(s.u, 1.0 / 3.0 + gamma, p);
    }

    e.horizon = tr.samples.back().t;
    for (std::size_t i = 0; i < m; ++i) {
        if (tails[i] > tail_tol) {
            e.horizon = tr.samples[i].t;
            break;
        }
    }
    e.horizon_from_event = std::any_of(
        tr.events.begin(), tr.events.end(), [](const event_hit& ev) {
            return ev.spec.k == event_spec::kind::tail_fraction;
        });

    const double t0 = tr.samples.front().t;
    const double m2 = consts.m_gamma * consts.m_gamma;
    const riccati_bound rb = riccati_from_h0(hs.front(), consts.c_riccati);
    const double dom_end = std::min(e.horizon, t0 + 0.95 * rb.t_star);

    e.min_h_over_y = std::numeric_limits<double>::infinity();
    double integral = 0.0;       // trapezoid of c * H^(3/2)
    double h_last_in_window = hs.front();
    for (std::size_t i = 0; i < m; ++i) {
        const double t = tr.samples[i].t;
        if (t <= e.horizon) {
            e.max_norm_third = std::max(e.max_norm_third, thirds[i]);
            if (i > 0 && tr.samples[i - 1].t <= e.horizon &&
                hs[i - 1] > m2 && hs[i] < hs[i - 1] * (1.0 - 1e-9))
                e.h_monotone_ok = false;
        }
        if (t <= dom_end) {
            const double y = rb.eval(t - t0);
            if (hs[i] < y * (1.0 - 1e-3)) e.domination_ok = false;
            e.min_h_over_y = std::min(e.min_h_over_y, hs[i] / y);
            if (i > 0 && tr.samples[i - 1].t <= dom_end) {
                const double dt = t - tr.samples[i - 1].t;
                integral += 0.5 * dt * consts.c_riccati *
                            (std::pow(hs[i - 1], 1.5) + std::pow(hs[i], 1.5));
            }
            h_last_in_window = hs[i];
        }
    }
    const double gain = h_last_in_window - hs.front();
    e.integral_ok = integral <= gain + 1e-6 * std::fabs(h_last_in_window) +
                                    1e-3 * std::fabs(hs.front());
    return e;
}

}  // namespace dyadic
