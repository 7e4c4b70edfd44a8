#pragma once

// Generated by tools/constants_oracle.py (60-digit arithmetic, mpmath).
// Do not edit by hand; regenerate with --emit if the formula set changes.

namespace fixtures {

struct ConstantCase {
    const char* tag;
    double lambda_, nu, alpha, gamma;
    double c_b_nominal, c_b_flux, epsilon, a_gamma;
    double c1, c2, c3, m_gamma, c_riccati;
};

inline constexpr ConstantCase constant_cases[] = {
    {"flagship", 2.0000000000000000, 1.0000000000000000, 0.25000000000000000, 0.10000000000000000, 0.34831069974900652, 0.69662139949801305, 0.30000000000000000, 0.48077480523101071, 0.29739670999407001, 0.076835764093677101, 0.18549794375025494, 245.57265972402755, 0.0092351748792283737},
    {"gamma_wide", 2.0000000000000000, 1.0000000000000000, 0.25000000000000000, 0.20000000000000000, 0.34831069974900652, 0.69662139949801305, 0.10000000000000000, 0.26790569709562573, 0.63901582154578852, 0.17004787657725316, 0.41053188988555073, 228.93992000837336, 0.011389198728514983},
    {"alpha_low", 2.0000000000000000, 1.0000000000000000, 0.20000000000000000, 0.10000000000000000, 0.27814779170091087, 0.55629558340182174, 0.60000000000000000, 0.71813408672085611, 0.29739670999407001, 0.076835764093677101, 0.17822116264556394, 163.85803565680362, 0.013794595318727988},
    {"lam_golden", 2.5000000000000000, 0.50000000000000000, 0.30000000000000000, 0.050000000000000000, 0.55672441140186354, 1.3918110285046588, 0.10000000000000000, 0.30977124848058012, 0.23989556596304327, 0.046106680147125782, 0.12600319909458579, 243.59418985611165, 0.0044632887101468534},
};

// Two-parameter spot values used by unit tests.
inline constexpr double c_b_nominal_lam2_alpha_half = 0.70710678118654752;

}  // namespace fixtures
