#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "dyadic/model.hpp"

using namespace dyadic;

namespace {

model_params make_params(double lambda, double nu, double alpha, int n) {
    model_params p;
    p.lambda = lambda;
    p.nu = nu;
    p.alpha = alpha;
    p.n_modes = n;
    return p;
}

std::vector<double> random_vector(std::mt19937_64& rng, int n,
                                  bool nonneg = false) {
    std::uniform_real_distribution<double> d(nonneg ? 0.0 : -1.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& x : u) x = d(rng);
    return u;
}

}  // namespace

TEST_CASE("params validation rejects out-of-range fields") {
    model_params p = make_params(2.0, 1.0, 0.25, 8);
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(make_params(1.0, 1.0, 0.25, 8).validate(), range_error);
    CHECK_THROWS_AS(make_params(2.0, -1.0, 0.25, 8).validate(), range_error);
    CHECK_THROWS_AS(make_params(2.0, 1.0, 0.0, 8).validate(), range_error);
    CHECK_THROWS_AS(make_params(2.0, 1.0, 0.25, 0).validate(), range_error);
}

TEST_CASE("single-mode force and force accessors") {
    const auto g = model_params::single_mode_force(4, 0.7);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == 0.7);
    CHECK(g[1] == 0.0);

    model_params p = make_params(2.0, 1.0, 0.25, 4);
    p.force = g;
    CHECK(p.force_at(1) == 0.7);
    CHECK(p.force_at(2) == 0.0);
    CHECK(p.force_at(9) == 0.0);  // beyond the stored vector
    CHECK(p.force_norm() == doctest::Approx(0.7).epsilon(1e-15));

    model_params q = make_params(2.0, 1.0, 0.25, 4);
    CHECK(q.force_norm() == 0.0);  // empty force means zero
}

TEST_CASE("unit_mode builds a * e_k with 1-based k") {
    const auto u = unit_mode(4, 2, 3.0);
    CHECK(u == std::vector<double>{0.0, 3.0, 0.0, 0.0});
}

TEST_CASE("cascade term on single-mode data") {
    const auto p = make_params(2.0, 1.0, 0.25, 4);
    const auto e1 = unit_mode(4, 1);
    const auto b = bilinear(e1, e1, p);
    CHECK(b == std::vector<double>{0.0, -4.0, 0.0, 0.0});
}

TEST_CASE("cascade term on a two-mode state") {
    const auto p = make_params(2.0, 1.0, 0.25, 4);
    const std::vector<double> u{1.0, 1.0, 0.0, 0.0};
    const auto b = bilinear(u, u, p);
    CHECK(b == std::vector<double>{4.0, -4.0, -8.0, 0.0});
}

TEST_CASE("cascade term rejects mismatched lengths") {
    const auto p = make_params(2.0, 1.0, 0.25, 4);
    const std::vector<double> u(4, 1.0), v(3, 1.0);
    CHECK_THROWS_AS((void)bilinear(u, v, p), dimension_error);
}

TEST_CASE("cascade term drops no energy: <B(u,u), u> telescopes to zero") {
    std::mt19937_64 rng(31);
    for (double lambda : {2.0, 2.5}) {
        const auto p = make_params(lambda, 1.0, 0.25, 32);
        for (int trial = 0; trial < 200; ++trial) {
            const auto u = random_vector(rng, 32);
            const auto b = bilinear(u, u, p);
            double dot = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                dot += b[i] * u[i];
                mag += std::fabs(b[i] * u[i]);
            }
            CHECK(std::fabs(dot) <= 1e-12 * mag);
        }
    }
}

TEST_CASE("trilinear form matches its shifted-index expansion") {
    // <B(u,v), w> = sum_n lambda^(n+1) u_n (v_{n+1} w_n - v_n w_{n+1}),
    // an independent route obtained by re-indexing the first sum.
    std::mt19937_64 rng(77);
    const auto p = make_params(2.0, 1.0, 0.25, 12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto u = random_vector(rng, 12);
        const auto v = random_vector(rng, 12);
        const auto w = random_vector(rng, 12);
        const auto b = bilinear(u, v, p);
        double direct = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) direct += b[i] * w[i];
        double shifted = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double vn1 = i + 1 < v.size() ? v[i + 1] : 0.0;
            const double wn1 = i + 1 < w.size() ? w[i + 1] : 0.0;
            const double term =
                std::pow(2.0, static_cast<double>(i) + 2.0) * u[i] *
                (vn1 * w[i] - v[i] * wn1);
            shifted += term;
            mag += std::fabs(term);
        }
        CHECK(std::fabs(direct - shifted) <= 1e-12 * std::max(mag, 1.0));
    }
}

TEST_CASE("right-hand side assembles force, dissipation, and cascade") {
    auto p = make_params(2.0, 1.0, 0.5, 2);
    const state s{0.0, {1.0, 1.0}};
    CHECK(galerkin_rhs(s, p) == std::vector<double>{-6.0, 0.0});

    p.force = model_params::single_mode_force(2, 3.0);
    CHECK(galerkin_rhs(s, p) == std::vector<double>{-3.0, 0.0});
}

TEST_CASE("dissipation operator applies lambda^(2 alpha power n)") {
    const auto p = make_params(2.0, 1.0, 0.25, 3);
    const std::vector<double> u{1.0, 1.0, 1.0};
    const auto a1 = apply_dissipation(u, p);
    CHECK(a1[0] == doctest::Approx(std::pow(2.0, 0.5)).epsilon(1e-15));
    CHECK(a1[2] == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
    const auto a2 = apply_dissipation(u, p, 2.0);
    CHECK(a2[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(a2[2] == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("norms on unit modes") {
    const auto p = make_params(2.0, 1.0, 0.25, 4);
    CHECK(energy_norm({3.0, 4.0, 0.0, 0.0}) == 5.0);
    CHECK(norm_gamma(unit_mode(4, 1), 0.3, p) ==
          doctest::Approx(std::pow(2.0, 0.3)).epsilon(1e-15));
    CHECK(enstrophy_norm(unit_mode(4, 2), p) ==
          doctest::Approx(std::pow(2.0, 0.5)).epsilon(1e-15));
    CHECK(norm_gamma(std::vector<double>(4, 0.0), 0.3, p) == 0.0);
}

TEST_CASE("norm accumulation survives amplitudes whose squares overflow") {
    const auto p = make_params(2.0, 1.0, 0.25, 2);
    const double big = std::ldexp(1.0, 600);  // big^2 overflows a double
    const std::vector<double> u{big, big};
    const double expected = big * std::sqrt(2.0 + 4.0);  // gamma = 1/2 weights
    CHECK(norm_gamma(u, 0.5, p) ==
          doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("a norm beyond the double range raises overflow_error") {
    const auto p = make_params(2.0, 1.0, 0.25, 20);
    auto u = unit_mode(20, 20, 1e300);
    CHECK_THROWS_AS((void)norm_gamma(u, 2.0, p), overflow_error);
}

TEST_CASE("an underflowing nonzero norm rounds up instead of vanishing") {
    const auto p = make_params(2.0, 1.0, 0.25, 1);
    const std::vector<double> u{std::numeric_limits<double>::denorm_min()};
    const double v = norm_gamma(u, -50.0, p);
    CHECK(v > 0.0);
    CHECK(v == std::numeric_limits<double>::denorm_min());
}

TEST_CASE("geometric_power_sum matches a plain loop in the safe range") {
    const std::vector<double> u{0.5, -1.5, 2.0};
    const double got =
        geometric_power_sum(u.data(), u.size(), 2.0, 1.0, 2).to_double("test");
    const double want = 2.0 * 0.25 + 4.0 * 2.25 + 8.0 * 4.0;
    CHECK(got == doctest::Approx(want).epsilon(1e-15));

    const double got3 =
        geometric_power_sum(u.data(), u.size(), 2.0, 0.5, 3).to_double("test");
    const double want3 = std::pow(2.0, 0.5) * 0.125 +
                         std::pow(2.0, 1.0) * 3.375 +
                         std::pow(2.0, 1.5) * 8.0;
    CHECK(got3 == doctest::Approx(want3).epsilon(1e-14));
}

TEST_CASE("geometric_weights throws once a weight leaves the double range") {
    CHECK_THROWS_AS((void)geometric_weights(2.0, 2.0, 600), overflow_error);
    const auto w = geometric_weights(2.0, 1.0, 4);
    CHECK(w == std::vector<double>{2.0, 4.0, 8.0, 16.0});
}

TEST_CASE("scaled_value round-trips and square-roots") {
    const auto v = scaled_value::from_double(3.25);
    CHECK(v.to_double("test") == 3.25);
    CHECK(scaled_value{}.to_double("test") == 0.0);
    const auto r = scaled_value::from_double(2.0).sqrt();
    CHECK(r.to_double("test") == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(scaled_value::from_double(4.0).ratio(scaled_value::from_double(0.5),
                                               "test") == 8.0);
    CHECK_THROWS_AS(scaled_value::from_double(1.0).ratio(scaled_value{}, "test"),
                    range_error);
}

TEST_CASE("tail_fraction measures the top modes' share") {
    const auto p = make_params(2.0, 1.0, 0.25, 32);
    CHECK(tail_fraction(unit_mode(32, 1), 0.1, p, 5) == 0.0);
    CHECK(tail_fraction(unit_mode(32, 32), 0.1, p, 5) ==
          doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> u(32, 0.0);
    u[0] = 1.0;
    u[27] = 1.0;  // mode 28, the lowest of the top five
    CHECK(tail_fraction(u, 0.0, p, 5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tail_fraction(std::vector<double>(32, 0.0), 0.1, p, 5) == 0.0);
    CHECK_THROWS_AS((void)tail_fraction(u, 0.1, p, 0), range_error);
}

TEST_CASE("weak distance metrizes componentwise closeness") {
    CHECK(weak_distance({1.0}, {}) == 0.25);
    CHECK(weak_distance(unit_mode(8, 1), std::vector<double>(8, 0.0)) == 0.25);
    const std::vector<double> u{0.3, -0.7, 0.1};
    CHECK(weak_distance(u, u) == 0.0);
    // symmetric and positive
    const std::vector<double> v{0.2, 0.0, 0.4};
    CHECK(weak_distance(u, v) == weak_distance(v, u));
    CHECK(weak_distance(u, v) > 0.0);
}

TEST_CASE("both flux routes agree on closed-form two-mode data") {
    const auto p = make_params(2.0, 1.0, 0.5, 4);
    const std::vector<double> u{1.0, 1.0, 0.0, 0.0};
    CHECK(flux_enstrophy(u, p) == doctest::Approx(-8.0).epsilon(1e-15));
    CHECK(flux_enstrophy_direct(u, p) == doctest::Approx(-8.0).epsilon(1e-14));
    CHECK(flux_gamma(u, 0.5, p) == doctest::Approx(-8.0).epsilon(1e-15));
    CHECK(flux_gamma_direct(u, 0.5, p) == doctest::Approx(-8.0).epsilon(1e-14));
}

TEST_CASE("flux routes agree on random states") {
    std::mt19937_64 rng(5);
    const auto p = make_params(2.0, 1.0, 0.35, 24);
    for (int trial = 0; trial < 100; ++trial) {
        const auto u = random_vector(rng, 24);
        const double a = flux_enstrophy(u, p);
        const double d = flux_enstrophy_direct(u, p);
        CHECK(std::fabs(a - d) <=
              1e-11 * std::max({std::fabs(a), std::fabs(d), 1.0}));
        const double ga = flux_gamma(u, 0.2, p);
        const double gd = flux_gamma_direct(u, 0.2, p);
        CHECK(std::fabs(ga - gd) <=
              1e-11 * std::max({std::fabs(ga), std::fabs(gd), 1.0}));
    }
}

TEST_CASE("Lyapunov functional adds the weighted cross term") {
    const auto p = make_params(2.0, 1.0, 0.25, 4);
    const std::vector<double> u{1.0, 1.0, 0.0, 0.0};
    const double g = 0.25, c2 = 0.5;
    const double want = std::pow(2.0, 0.5) + 2.0 + c2 * std::pow(2.0, 0.5);
    CHECK(lyapunov_h(u, g, c2, p) == doctest::Approx(want).epsilon(1e-15));
    // c2 = 0 reduces to the squared norm
    const double n2 = norm_gamma(u, g, p);
    CHECK(lyapunov_h(u, g, 0.0, p) == doctest::Approx(n2 * n2).epsilon(1e-15));
}

TEST_CASE("cubic weighted sum uses |u|^3 with exponent 1 + 2 gamma") {
    const auto p = make_params(2.0, 1.0, 0.25, 4);
    const std::vector<double> u{1.0, -1.0, 0.0, 0.0};
    const double want = std::pow(2.0, 1.2) + std::pow(2.0, 2.4);
    CHECK(cubic_weighted_sum(u, 0.1, p) ==
          doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("wavelet change of variables and its inverse") {
    const std::vector<double> v{1.0, 0.5};
    const auto m = wavelet_to_model(v, 0.25, 0.8);
    CHECK(m.mapped.u[0] == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
    CHECK(m.mapped.u[1] == doctest::Approx(0.5 * 8.0).epsilon(1e-15));
    CHECK(m.mapped.t == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.nu == doctest::Approx(0.1).epsilon(1e-15));

    const auto back = model_to_wavelet(m.mapped.u, m.mapped.t, m.nu);
    CHECK(back.mapped.u[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(back.mapped.u[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(back.mapped.t == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(back.nu == doctest::Approx(0.8).epsilon(1e-15));

    CHECK_THROWS_AS((void)wavelet_to_model(v, 0.0, 1.0, 3.0),
                    unsupported_conversion_error);
}
