#include "dyadic/params.hpp"

#include <cmath>
#include <string>

namespace dyadic {

void model_params::validate() const {
    if (!(lambda > 1.0) || !std::isfinite(lambda))
        throw range_error("lambda must be finite and > 1, got " +
                          std::to_string(lambda));
    if (!(nu >= 0.0) || !std::isfinite(nu))
        throw range_error("nu must be finite and >= 0, got " +
                          std::to_string(nu));
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw range_error("alpha must be finite and > 0, got " +
                          std::to_string(alpha));
    if (n_modes < 1)
        throw range_error("n_modes must be >= 1, got " +
                          std::to_string(n_modes));
    // The cascade coefficient of the deepest mode, lambda^(N+1), has to be
    // representable; deeper truncations need a wider float type.
    if (!std::isfinite(std::pow(lambda, static_cast<double>(n_modes) + 1.0)))
        throw range_error("truncation too deep: lambda^(n_modes+1) overflows");
    if (!force.empty() && static_cast<int>(force.size()) != n_modes)
        throw dimension_error("force vector has " +
                              std::to_string(force.size()) +
                              " entries, expected " + std::to_string(n_modes));
    for (double g : force)
        if (!std::isfinite(g))
            throw range_error("force vector contains a non-finite entry");
}

std::vector<double> model_params::single_mode_force(int n_modes, double g1) {
    std::vector<double> g(static_cast<std::size_t>(n_modes), 0.0);
    g[0] = g1;
    return g;
}

double model_params::force_norm() const {
    double s = 0.0;
    for (double g : force) s += g * g;
    return std::sqrt(s);
}

std::vector<double> unit_mode(int n_modes, int k, double a) {
    if (k < 1 || k > n_modes)
        throw range_error("unit_mode index " + std::to_string(k) +
                          " outside 1.." + std::to_string(n_modes));
    std::vector<double> u(static_cast<std::size_t>(n_modes), 0.0);
    u[static_cast<std::size_t>(k - 1)] = a;
    return u;
}

}  // namespace dyadic
