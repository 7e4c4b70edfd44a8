#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "dyadic/kernels.hpp"

using dyadic::kernels::active;
using dyadic::kernels::avx2_ops;
using dyadic::kernels::ops;
using dyadic::kernels::scalar_ops;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n,
                                  double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> u(n);
    for (double& x : u) x = d(rng);
    return u;
}

// Relative agreement gauge: |a - b| <= tol * max(|a|, |b|, floor).
bool close(double a, double b, double tol, double floor = 1.0) {
    return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), floor});
}

}  // namespace

TEST_CASE("kernel dispatch honors the environment override") {
    const char* env = std::getenv("DYADIC_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) {
        CHECK(std::string(active().name) == "scalar");
    } else if (avx2_ops() != nullptr) {
        CHECK(std::string(active().name) == "avx2");
    } else {
        CHECK(std::string(active().name) == "scalar");
    }
}

TEST_CASE("scalar reference results on tiny closed-form inputs") {
    const ops& k = scalar_ops();
    const double u[3] = {1.0, 2.0, 3.0};
    const double w[3] = {2.0, 4.0, 8.0};
    CHECK(k.weighted_sumsq(w, u, 3) == 2.0 + 16.0 + 72.0);
    CHECK(k.weighted_sumsq(nullptr, u, 3) == 14.0);
    const double b[3] = {3.0, 2.0, 1.0};
    CHECK(k.weighted_dot(w, u, b, 3) == 6.0 + 16.0 + 24.0);
    CHECK(k.weighted_dot(nullptr, u, b, 3) == 3.0 + 4.0 + 3.0);
    // u[n] = 0 convention for the trailing factor
    CHECK(k.weighted_triple(w, u, 3) == 2.0 * 1.0 * 2.0 + 4.0 * 4.0 * 3.0);
    CHECK(k.min_element(u, 3) == 1.0);

    double y[3] = {1.0, 1.0, 1.0};
    k.axpy(2.0, u, y, 3);
    CHECK(y[0] == 3.0);
    CHECK(y[2] == 7.0);
    k.scaled_mul_add(0.5, w, u, y, 3);
    CHECK(y[0] == 4.0);
    CHECK(y[2] == 19.0);
    double z[3];
    k.hadamard(w, u, z, 3);
    CHECK(z[1] == 8.0);
}

TEST_CASE("scalar rhs kernel composes the model right-hand side") {
    const ops& k = scalar_ops();
    // lambda = 2, nu table nu_d, boundary u[-1] = u[n] = 0
    const double u[3] = {1.0, 1.0, 0.5};
    const double nu_d[3] = {2.0, 4.0, 8.0};
    const double la[3] = {2.0, 4.0, 8.0};
    const double lb[3] = {4.0, 8.0, 16.0};
    const double g[3] = {0.5, 0.0, 0.0};
    double out[3];
    k.rhs(u, nu_d, la, lb, g, out, 3);
    CHECK(out[0] == 0.5 - 2.0 + 0.0 - 4.0 * 1.0 * 1.0);
    CHECK(out[1] == -4.0 + 4.0 * 1.0 - 8.0 * 1.0 * 0.5);
    CHECK(out[2] == -8.0 * 0.5 + 8.0 * 1.0 - 0.0);
    // null force reads as zero
    k.rhs(u, nu_d, la, lb, nullptr, out, 3);
    CHECK(out[0] == -2.0 - 4.0);
}

TEST_CASE("vector kernels match the scalar reference on random data") {
    const ops* vec = avx2_ops();
    if (vec == nullptr) return;  // host without AVX2: nothing to compare
    const ops& ref = scalar_ops();
    std::mt19937_64 rng(1234);

    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u,
                          40u, 64u, 100u}) {
        const auto u = random_vector(rng, n);
        const auto v = random_vector(rng, n);
        const auto w = random_vector(rng, n, 0.5, 4.0);
        const auto q = random_vector(rng, n, -2.0, 2.0);

        CHECK(close(ref.weighted_sumsq(w.data(), u.data(), n),
                    vec->weighted_sumsq(w.data(), u.data(), n), 1e-13));
        CHECK(close(ref.weighted_sumsq(nullptr, u.data(), n),
                    vec->weighted_sumsq(nullptr, u.data(), n), 1e-13));
        CHECK(close(ref.weighted_dot(w.data(), u.data(), v.data(), n),
                    vec->weighted_dot(w.data(), u.data(), v.data(), n), 1e-13,
                    1e-6));
        CHECK(close(ref.weighted_dot(nullptr, u.data(), v.data(), n),
                    vec->weighted_dot(nullptr, u.data(), v.data(), n), 1e-13,
                    1e-6));
        CHECK(close(ref.weighted_triple(w.data(), u.data(), n),
                    vec->weighted_triple(w.data(), u.data(), n), 1e-13, 1e-6));
        CHECK(ref.min_element(u.data(), n) == vec->min_element(u.data(), n));

        auto y1 = random_vector(rng, n);
        auto y2 = y1;
        ref.axpy(0.37, u.data(), y1.data(), n);
        vec->axpy(0.37, u.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-14));

        ref.scaled_mul_add(-1.3, w.data(), u.data(), y1.data(), n);
        vec->scaled_mul_add(-1.3, w.data(), u.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-13));

        auto z1 = std::vector<double>(n), z2 = std::vector<double>(n);
        ref.hadamard(w.data(), u.data(), z1.data(), n);
        vec->hadamard(w.data(), u.data(), z2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(z1[i] == z2[i]);

        std::vector<double> o1(n), o2(n);
        const auto g = random_vector(rng, n);
        ref.rhs(u.data(), w.data(), q.data(), v.data(), g.data(), o1.data(), n);
        vec->rhs(u.data(), w.data(), q.data(), v.data(), g.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 1e-13));
        ref.rhs(u.data(), w.data(), q.data(), v.data(), nullptr, o1.data(), n);
        vec->rhs(u.data(), w.data(), q.data(), v.data(), nullptr, o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 1e-13));
    }
}

TEST_CASE("min_element scans the whole vector including the tail") {
    const ops& k = active();
    std::vector<double> u(19, 5.0);
    u[18] = -3.0;  // in the scalar remainder of a vectorized pass
    CHECK(k.min_element(u.data(), u.size()) == -3.0);
    u[0] = -7.0;
    CHECK(k.min_element(u.data(), u.size()) == -7.0);
    CHECK(k.min_element(u.data(), 1) == -7.0);
}
