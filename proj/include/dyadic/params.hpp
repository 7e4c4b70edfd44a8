#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dyadic/errors.hpp"

namespace dyadic {

/// Parameters of the truncated cascade model
///
///     du_n/dt + nu * lambda^(2*alpha*n) * u_n
///             - lambda^n * u_{n-1}^2
///             + lambda^(n+1) * u_n * u_{n+1} = g_n,      1 <= n <= n_modes,
///
/// with the boundary convention u_0 = u_{n_modes+1} = 0.  Vectors are stored
/// zero-based, so array index i holds mode n = i + 1.
struct model_params {
    double lambda = 2.0;       ///< spectral spacing, > 1
    double nu = 1.0;           ///< viscosity, >= 0
    double alpha = 0.25;       ///< dissipation exponent, > 0
    int n_modes = 32;          ///< truncation size N, >= 1
    std::vector<double> force; ///< g, size n_modes (empty means zero force)

    /// Throws range_error when a field is outside its documented range.
    void validate() const;

    /// Force vector g = g1 * e_1 padded to n_modes entries.
    static std::vector<double> single_mode_force(int n_modes, double g1);

    /// nu * lambda^(2*alpha*n) for mode n (1-based).
    double dissipation_rate(int n) const {
        return nu * std::pow(lambda, 2.0 * alpha * static_cast<double>(n));
    }

    /// Force amplitude of mode n (1-based); zero when unset.
    double force_at(int n) const {
        const auto i = static_cast<std::size_t>(n - 1);
        return i < force.size() ? force[i] : 0.0;
    }

    /// l2 magnitude of the force vector.
    double force_norm() const;

    bool operator==(const model_params&) const = default;
};

/// Instantaneous state: time plus the vector of mode amplitudes.
struct state {
    double t = 0.0;
    std::vector<double> u;

    int n_modes() const { return static_cast<int>(u.size()); }
};

/// a * e_k as a coefficient vector of length n_modes (k is 1-based).
std::vector<double> unit_mode(int n_modes, int k, double a = 1.0);

}  // namespace dyadic
