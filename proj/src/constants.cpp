#include "dyadic/constants.hpp"

#include <cmath>
#include <limits>

namespace dyadic {

constant_set constants(const model_params& p, double gamma) {
    p.validate();
    if (!std::isfinite(gamma))
        throw range_error("gamma must be finite");

    constant_set c;
    c.lambda = p.lambda;
    c.nu = p.nu;
    c.alpha = p.alpha;
    c.gamma = gamma;
    c.c_b_nominal = std::pow(p.lambda, p.alpha) - std::pow(p.lambda, -p.alpha);
    c.c_b_flux =
        std::pow(p.lambda, 1.0 + p.alpha) - std::pow(p.lambda, 1.0 - p.alpha);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    c.gamma_range_valid =
        p.alpha < 1.0 / 3.0 && gamma > 0.0 && gamma < 1.0 - 3.0 * p.alpha;
    c.epsilon = 2.0 - 6.0 * p.alpha - 2.0 * gamma;

    // The weighted-form coefficients are well defined for any gamma > 0.
    if (gamma > 0.0) {
        c.c1 = std::pow(p.lambda, 2.0 * gamma + 1.0) - p.lambda;
        c.c2 = 2.0 * c.c1 /
               (2.0 * p.lambda + p.lambda * p.lambda / 2.0 +
                std::pow(p.lambda, 1.0 - 2.0 * gamma));
        c.c3 = (1.0 + std::pow(p.lambda, 2.0 * p.alpha)) * c.c2;
    } else {
        c.c1 = c.c2 = c.c3 = nan;
    }

    // The threshold family needs epsilon > 0, i.e. the admissible window.
    if (c.gamma_range_valid) {
        c.a_gamma = std::sqrt(std::pow(p.lambda, c.epsilon) - 1.0);
        c.m_gamma = 8.0 * p.nu * (2.0 + c.c3) * std::sqrt(1.0 + c.c2) /
                    (c.a_gamma * p.lambda * c.c2);
        c.c_riccati = c.a_gamma * p.lambda * c.c2 / 8.0;
    } else {
        c.a_gamma = c.m_gamma = c.c_riccati = nan;
    }
    return c;
}

double default_blowup_gamma(double alpha) {
    const double window = 1.0 - 3.0 * alpha;
    return std::min(1.0 / 3.0, window) / 4.0;
}

}  // namespace dyadic
