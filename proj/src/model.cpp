#include "dyadic/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/kernels.hpp"

namespace dyadic {
namespace {

/// Running sum of nonnegative scaled terms.  The fraction is allowed to grow
/// to ~2^60 between renormalizations, which a final frexp folds back in.
struct scaled_sum {
    double frac = 0.0;
    long exp = 0;

    void add(double term_frac, long term_exp) {
        if (term_frac == 0.0) return;
        if (frac == 0.0) {
            frac = term_frac;
            exp = term_exp;
            return;
        }
        const long d = term_exp - exp;
        if (d > 0) {
            frac = std::ldexp(frac, static_cast<int>(std::max(-d, -2100L))) +
                   term_frac;
            exp = term_exp;
        } else {
            frac += std::ldexp(term_frac, static_cast<int>(std::max(d, -2100L)));
        }
    }

    scaled_value value() const {
        if (frac == 0.0) return {};
        int e = 0;
        const double f = std::frexp(frac, &e);
        return {f, exp + e};
    }
};

double checked(double v, const char* context) {
    if (!std::isfinite(v)) throw overflow_error(std::string(context) + " overflowed the double range");
    return v;
}

}  // namespace

double scaled_value::log2() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log2(frac) + static_cast<double>(exp);
}

double scaled_value::to_double(const char* context) const {
    if (is_zero()) return 0.0;
    const double v = std::ldexp(frac, static_cast<int>(std::clamp(exp, -2200L, 2200L)));
    if (std::isinf(v)) throw overflow_error(std::string(context) + " overflowed the double range");
    // A nonzero sum that underflows rounds to the smallest positive double
    // rather than to zero, preserving "zero iff the input was zero".
    if (v == 0.0) return std::numeric_limits<double>::denorm_min();
    return v;
}

scaled_value scaled_value::sqrt() const {
    if (is_zero()) return {};
    double f = frac;
    long e = exp;
    if (e % 2 != 0) {
        f *= 2.0;
        e -= 1;
    }
    int e2 = 0;
    const double r = std::frexp(std::sqrt(f), &e2);
    return {r, e / 2 + e2};
}

scaled_value scaled_value::from_double(double v) {
    if (v == 0.0) return {};
    int e = 0;
    const double f = std::frexp(std::abs(v), &e);
    return {f, e};
}

double scaled_value::ratio(const scaled_value& other, const char* context) const {
    if (other.is_zero()) throw range_error(std::string(context) + ": division by a zero scaled value");
    if (is_zero()) return 0.0;
    const long d = exp - other.exp;
    const double v = std::ldexp(frac / other.frac, static_cast<int>(std::clamp(d, -2200L, 2200L)));
    return checked(v, context);
}

scaled_value geometric_power_sum(const double* u, std::size_t n, double lambda,
                                 double c, int k, int lo) {
    const double log2lam = std::log2(lambda);
    scaled_sum acc;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] == 0.0) continue;
        const double wlog = c * (static_cast<double>(i) + lo) * log2lam;
        const double wfloor = std::floor(wlog);
        const double wfrac = std::exp2(wlog - wfloor);  // in [1, 2)
        int eu = 0;
        const double mu = std::frexp(std::abs(u[i]), &eu);
        double term = wfrac;
        for (int j = 0; j < k; ++j) term *= mu;
        acc.add(term, static_cast<long>(wfloor) + static_cast<long>(k) * eu);
    }
    return acc.value();
}

std::vector<double> geometric_weights(double lambda, double c, int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] = std::pow(lambda, c * (i + 1.0));
        if (!std::isfinite(w[static_cast<std::size_t>(i)]))
            throw overflow_error("geometric weight lambda^(" +
                                 std::to_string(c * (i + 1.0)) +
                                 ") overflowed the double range");
    }
    return w;
}

namespace {

void require_modes(const std::vector<double>& u, const model_params& p,
                   const char* who) {
    if (static_cast<int>(u.size()) != p.n_modes)
        throw dimension_error(std::string(who) + ": vector has " +
                              std::to_string(u.size()) + " entries, expected " +
                              std::to_string(p.n_modes));
}

/// True when sum_i lambda^(c*(i+1)) * |u_i|^k can be accumulated directly in
/// doubles with headroom on both ends of the exponent range.
bool plain_sum_safe(const std::vector<double>& u, double lambda, double c,
                    int k, double* maxabs_out) {
    double maxabs = 0.0;
    for (double x : u) maxabs = std::max(maxabs, std::abs(x));
    *maxabs_out = maxabs;
    if (maxabs == 0.0) return true;
    const double log2lam = std::log2(lambda);
    const double n = static_cast<double>(u.size());
    const double w_lo = std::min(c * 1.0, c * n) * log2lam;
    const double w_hi = std::max(c * 1.0, c * n) * log2lam;
    const double m = k * std::log2(maxabs);
    return w_hi + m < 1000.0 && w_lo + m > -1000.0;
}

}  // namespace

double norm_gamma(const std::vector<double>& u, double gamma,
                  const model_params& p) {
    require_modes(u, p, "norm_gamma");
    double maxabs = 0.0;
    if (plain_sum_safe(u, p.lambda, 2.0 * gamma, 2, &maxabs)) {
        if (maxabs == 0.0) return 0.0;
        const auto w = geometric_weights(p.lambda, 2.0 * gamma, p.n_modes);
        const double s =
            kernels::active().weighted_sumsq(w.data(), u.data(), u.size());
        return std::sqrt(s);
    }
    return geometric_power_sum(u.data(), u.size(), p.lambda, 2.0 * gamma, 2)
        .sqrt()
        .to_double("norm_gamma");
}

double energy_norm(const std::vector<double>& u) {
    return std::sqrt(
        kernels::active().weighted_sumsq(nullptr, u.data(), u.size()));
}

double enstrophy_norm(const std::vector<double>& u, const model_params& p) {
    return norm_gamma(u, p.alpha, p);
}

double tail_fraction(const std::vector<double>& u, double gamma,
                     const model_params& p, int width) {
    require_modes(u, p, "tail_fraction");
    if (width < 1) throw range_error("tail width must be >= 1");
    const int n = p.n_modes;
    const int w = std::min(width, n);
    const auto den =
        geometric_power_sum(u.data(), u.size(), p.lambda, 2.0 * gamma, 2);
    if (den.is_zero()) return 0.0;
    const auto num =
        geometric_power_sum(u.data() + (n - w), static_cast<std::size_t>(w),
                            p.lambda, 2.0 * gamma, 2, n - w + 1);
    return num.ratio(den, "tail_fraction");
}

double weak_distance(const std::vector<double>& u,
                     const std::vector<double>& v) {
    const std::size_t n = std::max(u.size(), v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i < u.size() ? u[i] : 0.0;
        const double b = i < v.size() ? v[i] : 0.0;
        const double d = std::abs(a - b);
        if (d == 0.0) continue;
        const double m = static_cast<double>(i + 1);
        const double w = std::exp2(-m * m);
        if (w == 0.0) break;  // weights only shrink from here on
        acc += w * d / (1.0 + d);
    }
    return acc;
}

std::vector<double> bilinear(const std::vector<double>& u,
                             const std::vector<double>& v,
                             const model_params& p) {
    require_modes(u, p, "bilinear");
    require_modes(v, p, "bilinear");
    const int n = p.n_modes;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double up = i > 0 ? u[static_cast<std::size_t>(i - 1)] : 0.0;
        const double vp = i > 0 ? v[static_cast<std::size_t>(i - 1)] : 0.0;
        const double vn = i + 1 < n ? v[static_cast<std::size_t>(i + 1)] : 0.0;
        const double lam_n = std::pow(p.lambda, i + 1.0);
        out[static_cast<std::size_t>(i)] =
            -lam_n * up * vp +
            lam_n * p.lambda * u[static_cast<std::size_t>(i)] * vn;
    }
    return out;
}

std::vector<double> galerkin_rhs(const state& s, const model_params& p) {
    require_modes(s.u, p, "galerkin_rhs");
    const int n = p.n_modes;
    std::vector<double> nu_d(static_cast<std::size_t>(n)),
        la(static_cast<std::size_t>(n)), lb(static_cast<std::size_t>(n)),
        out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        nu_d[static_cast<std::size_t>(i)] = p.dissipation_rate(i + 1);
        la[static_cast<std::size_t>(i)] = std::pow(p.lambda, i + 1.0);
        lb[static_cast<std::size_t>(i)] = std::pow(p.lambda, i + 2.0);
    }
    kernels::active().rhs(s.u.data(), nu_d.data(), la.data(), lb.data(),
                          p.force.empty() ? nullptr : p.force.data(),
                          out.data(), s.u.size());
    return out;
}

std::vector<double> apply_dissipation(const std::vector<double>& u,
                                      const model_params& p, double power) {
    require_modes(u, p, "apply_dissipation");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w =
            std::pow(p.lambda, 2.0 * p.alpha * power * (static_cast<double>(i) + 1.0));
        out[i] = w * u[i];
        if (u[i] != 0.0 && !std::isfinite(out[i]))
            throw overflow_error("apply_dissipation overflowed at mode " +
                                 std::to_string(i + 1));
    }
    return out;
}

double flux_enstrophy(const std::vector<double>& u, const model_params& p) {
    require_modes(u, p, "flux_enstrophy");
    const int n = p.n_modes;
    if (n < 2) return 0.0;
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double m = i + 1.0;
        w[static_cast<std::size_t>(i)] =
            std::pow(p.lambda, m + 1.0) *
            (std::pow(p.lambda, 2.0 * p.alpha * (m + 1.0)) -
             std::pow(p.lambda, 2.0 * p.alpha * m));
    }
    return -kernels::active().weighted_triple(w.data(), u.data(), u.size());
}

double flux_enstrophy_direct(const std::vector<double>& u,
                             const model_params& p) {
    const auto b = bilinear(u, u, p);
    const auto au = apply_dissipation(u, p, 1.0);
    return kernels::active().weighted_dot(nullptr, b.data(), au.data(),
                                          b.size());
}

double flux_gamma(const std::vector<double>& u, double gamma,
                  const model_params& p) {
    require_modes(u, p, "flux_gamma");
    const int n = p.n_modes;
    if (n < 2) return 0.0;
    const double c1 =
        std::pow(p.lambda, 2.0 * gamma + 1.0) - p.lambda;
    const auto w = geometric_weights(p.lambda, 1.0 + 2.0 * gamma, n);
    return -c1 * kernels::active().weighted_triple(w.data(), u.data(), u.size());
}

double flux_gamma_direct(const std::vector<double>& u, double gamma,
                         const model_params& p) {
    const auto b = bilinear(u, u, p);
    const auto agu = apply_dissipation(u, p, gamma / p.alpha);
    return kernels::active().weighted_dot(nullptr, b.data(), agu.data(),
                                          b.size());
}

double lyapunov_h(const std::vector<double>& u, double gamma, double c2,
                  const model_params& p) {
    require_modes(u, p, "lyapunov_h");
    const auto w = geometric_weights(p.lambda, 2.0 * gamma, p.n_modes);
    const auto& k = kernels::active();
    const double sq = k.weighted_sumsq(w.data(), u.data(), u.size());
    double cross = 0.0;
    if (u.size() > 1)
        cross = k.weighted_dot(w.data(), u.data(), u.data() + 1, u.size() - 1);
    return checked(sq + c2 * cross, "lyapunov_h");
}

double cubic_weighted_sum(const std::vector<double>& u, double gamma,
                          const model_params& p) {
    require_modes(u, p, "cubic_weighted_sum");
    double maxabs = 0.0;
    if (plain_sum_safe(u, p.lambda, 1.0 + 2.0 * gamma, 3, &maxabs)) {
        if (maxabs == 0.0) return 0.0;
        const auto w = geometric_weights(p.lambda, 1.0 + 2.0 * gamma, p.n_modes);
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double a = std::abs(u[i]);
            acc += w[i] * a * a * a;
        }
        return acc;
    }
    return geometric_power_sum(u.data(), u.size(), p.lambda, 1.0 + 2.0 * gamma, 3)
        .to_double("cubic_weighted_sum");
}

wavelet_map wavelet_to_model(const std::vector<double>& v, double t_wavelet,
                             double nu, double target_lambda) {
    if (target_lambda != 2.0)
        throw unsupported_conversion_error(
            "wavelet change of variables is only defined for lambda = 2, got " +
            std::to_string(target_lambda));
    wavelet_map out;
    out.mapped.t = 8.0 * t_wavelet;
    out.mapped.u.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.mapped.u[i] = std::exp2(1.5 * (static_cast<double>(i) + 1.0)) * v[i];
    out.nu = nu / 8.0;
    return out;
}

wavelet_map model_to_wavelet(const std::vector<double>& u, double t_model,
                             double nu_model, double source_lambda) {
    if (source_lambda != 2.0)
        throw unsupported_conversion_error(
            "wavelet change of variables is only defined for lambda = 2, got " +
            std::to_string(source_lambda));
    wavelet_map out;
    out.mapped.t = t_model / 8.0;
    out.mapped.u.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out.mapped.u[i] = std::exp2(-1.5 * (static_cast<double>(i) + 1.0)) * u[i];
    out.nu = nu_model * 8.0;
    return out;
}

}  // namespace dyadic
