#pragma once

#include "dyadic/params.hpp"

namespace dyadic {

/// Derived constants of the cascade analysis for a given (lambda, nu, alpha,
/// gamma).  The cascade-bound constants exist for any valid parameters and
/// the weighted-form coefficients c1..c3 for any gamma > 0; the threshold
/// family (a_gamma, m_gamma, c_riccati) only in the supercritical window
/// alpha < 1/3, 0 < gamma < 1 - 3*alpha, flagged via `gamma_range_valid`
/// (out-of-range fields are quiet NaN).
struct constant_set {
    double lambda = 0.0;
    double nu = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;

    /// lambda^alpha - lambda^-alpha: spectral-gap factor of one cascade step;
    /// kept for reference and regression.
    double c_b_nominal = 0.0;
    /// lambda^(1+alpha) - lambda^(1-alpha): coefficient produced by the
    /// telescoped flux expansion; this is the one the flux bounds and the
    /// inequality suite use.
    double c_b_flux = 0.0;

    double epsilon = 0.0;    ///< 2 - 6*alpha - 2*gamma (> 0 in range)
    double a_gamma = 0.0;    ///< sqrt(lambda^epsilon - 1)
    double c1 = 0.0;         ///< lambda^(2*gamma+1) - lambda
    double c2 = 0.0;         ///< 2*c1 / (2*lambda + lambda^2/2 + lambda^(1-2*gamma))
    double c3 = 0.0;         ///< (1 + lambda^(2*alpha)) * c2
    double m_gamma = 0.0;    ///< 8*nu*(2+c3)*sqrt(1+c2) / (a_gamma*lambda*c2)
    double c_riccati = 0.0;  ///< a_gamma*lambda*c2 / 8

    bool gamma_range_valid = false;
};

/// Evaluate the constant set.  Throws range_error for invalid model
/// parameters; an out-of-range gamma is reported through the flag, not an
/// exception, so callers can still use the cascade-bound constants.
constant_set constants(const model_params& p, double gamma);

/// Default gamma for supercritical studies: min(1/3, 1-3*alpha)/4.
double default_blowup_gamma(double alpha);

}  // namespace dyadic
