#pragma once

#include <vector>

#include "dyadic/params.hpp"

namespace dyadic {

/// A nonnegative scalar kept as frac * 2^exp with frac in [0.5, 1) (or zero).
/// Weighted spectral sums can exceed the double range long before the final
/// norm does, so accumulation happens in this representation and conversion
/// back to double is the only place an overflow can be raised.
struct scaled_value {
    double frac = 0.0;
    long exp = 0;

    bool is_zero() const { return frac == 0.0; }
    /// log2 of the value; -inf for zero.
    double log2() const;
    /// Throws overflow_error(context) if the value exceeds the double range.
    double to_double(const char* context) const;
    /// Square root in scaled form (value must be the square of the result).
    scaled_value sqrt() const;

    static scaled_value from_double(double v);
    /// this / other as a double (both nonnegative; other nonzero).
    double ratio(const scaled_value& other, const char* context) const;
};

/// sum_i lambda^(c*(i+lo)) * |u[i]|^k for k = 2 or 3, accumulated in scaled
/// form.  `lo` is the 1-based mode number of u[0] (normally 1).
scaled_value geometric_power_sum(const double* u, std::size_t n, double lambda,
                                 double c, int k, int lo = 1);

/// Weight table w[i] = lambda^(c*(i+1)), i = 0..n-1.  Throws overflow_error
/// when a weight leaves the double range; use geometric_power_sum instead in
/// that regime.
std::vector<double> geometric_weights(double lambda, double c, int n);

/// ||u||_gamma = sqrt(sum_n lambda^(2*gamma*n) * u_n^2).
/// Chooses a plain fused loop when every term is safely inside the double
/// range and falls back to exponent-separated accumulation otherwise.
/// Throws overflow_error only if the norm itself is not representable.
double norm_gamma(const std::vector<double>& u, double gamma,
                  const model_params& p);

/// Convenience norms: energy |u| (gamma = 0) and enstrophy ||u||_alpha.
double energy_norm(const std::vector<double>& u);
double enstrophy_norm(const std::vector<double>& u, const model_params& p);

/// Fraction of ||u||_gamma^2 carried by the top `width` modes (0 when u = 0).
/// Computed in scaled form, so it stays valid when the norm itself would
/// overflow a double.
double tail_fraction(const std::vector<double>& u, double gamma,
                     const model_params& p, int width);

/// Metrizes the weak topology: sum_n 2^(-n^2) |u_n - v_n| / (1 + |u_n - v_n|).
/// Vectors of different lengths are compared by zero-padding the shorter one.
double weak_distance(const std::vector<double>& u, const std::vector<double>& v);

/// Cascade term (B(u,v))_n = -lambda^n u_{n-1} v_{n-1}
///                           + lambda^(n+1) u_n v_{n+1},
/// with u_0 = v_0 = 0 and entries beyond the truncation treated as zero.
std::vector<double> bilinear(const std::vector<double>& u,
                             const std::vector<double>& v,
                             const model_params& p);

/// Full right-hand side g - nu*A u - B(u,u) evaluated at a state.
std::vector<double> galerkin_rhs(const state& s, const model_params& p);

/// (A^power u)_n = lambda^(2*alpha*power*n) u_n.
std::vector<double> apply_dissipation(const std::vector<double>& u,
                                      const model_params& p,
                                      double power = 1.0);

/// <B(u,u), A u> via the telescoped expansion
///     -sum_n lambda^(n+1) (lambda^(2a(n+1)) - lambda^(2an)) u_n^2 u_{n+1}.
double flux_enstrophy(const std::vector<double>& u, const model_params& p);

/// Same quantity as an explicit inner product <B(u,u), A u>; kept as an
/// independent route for verification.
double flux_enstrophy_direct(const std::vector<double>& u,
                             const model_params& p);

/// <B(u,u), A^(gamma/alpha) u> = -c1 * sum_n lambda^((1+2*gamma)n) u_n^2 u_{n+1}
/// with c1 = lambda^(2*gamma+1) - lambda.
double flux_gamma(const std::vector<double>& u, double gamma,
                  const model_params& p);

/// Inner-product route of flux_gamma, for verification.
double flux_gamma_direct(const std::vector<double>& u, double gamma,
                         const model_params& p);

/// H(u) = ||u||_gamma^2 + c2 * sum_n lambda^(2*gamma*n) u_n u_{n+1}.
double lyapunov_h(const std::vector<double>& u, double gamma, double c2,
                  const model_params& p);

/// sum_n lambda^((1+2*gamma)n) |u_n|^3, the cubic sum controlled from below
/// by the norm ||u||_{alpha+gamma}^3 in the admissible parameter range.
double cubic_weighted_sum(const std::vector<double>& u, double gamma,
                          const model_params& p);

/// Result of the change of variables between the wavelet-side system and the
/// lambda = 2 cascade model (a state plus the rescaled viscosity).
struct wavelet_map {
    state mapped;
    double nu;
};

/// Wavelet-side coefficients v at time t_wavelet with viscosity nu map to the
/// lambda = 2 cascade model via u_j = 2^(3j/2) v_j, t = 8 t_w, nu' = nu / 8.
/// Throws unsupported_conversion_error when target_lambda != 2.
wavelet_map wavelet_to_model(const std::vector<double>& v, double t_wavelet,
                             double nu, double target_lambda = 2.0);

/// Exact inverse of wavelet_to_model.
wavelet_map model_to_wavelet(const std::vector<double>& u, double t_model,
                             double nu_model, double source_lambda = 2.0);

}  // namespace dyadic
