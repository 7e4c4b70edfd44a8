#pragma once

#include <cstddef>

namespace dyadic::kernels {

/// Hot inner loops of the solver, provided in two equivalent flavours:
/// a portable scalar reference and an AVX2+FMA variant.  The active table is
/// picked once at startup from CPU capabilities; set DYADIC_KERNELS=scalar
/// in the environment to force the reference path.  Within one build and
/// machine the selection is stable, so results are bit-reproducible.
///
/// All kernels use the zero-based layout of model vectors (index i is mode
/// i+1) and assume coefficient tables were precomputed by the caller.
struct ops {
    /// out[i] = g[i] - nu_d[i]*u[i] + la[i]*u[i-1]^2 - lb[i]*u[i]*u[i+1]
    /// with u[-1] = u[n] = 0; g may be null (treated as zero).
    void (*rhs)(const double* u, const double* nu_d, const double* la,
                const double* lb, const double* g, double* out, std::size_t n);

    /// sum_i w[i] * u[i]^2   (w may be null: plain sum of squares)
    double (*weighted_sumsq)(const double* w, const double* u, std::size_t n);

    /// sum_i w[i] * a[i] * b[i]   (w may be null: plain dot product)
    double (*weighted_dot)(const double* w, const double* a, const double* b,
                           std::size_t n);

    /// sum_i w[i] * u[i]^2 * u[i+1]   (u[n] = 0)
    double (*weighted_triple)(const double* w, const double* u, std::size_t n);

    /// y[i] += s * x[i]
    void (*axpy)(double s, const double* x, double* y, std::size_t n);

    /// y[i] += s * q[i] * x[i]
    void (*scaled_mul_add)(double s, const double* q, const double* x,
                           double* y, std::size_t n);

    /// y[i] = p[i] * x[i]
    void (*hadamard)(const double* p, const double* x, double* y,
                     std::size_t n);

    /// min_i u[i]   (n >= 1)
    double (*min_element)(const double* u, std::size_t n);

    const char* name;
};

/// Table selected for this process (scalar unless AVX2+FMA are available).
const ops& active();

/// Reference implementation; always available.
const ops& scalar_ops();

/// AVX2 implementation, or nullptr when unsupported by the CPU or build.
const ops* avx2_ops();

}  // namespace dyadic::kernels
