// AVX2+FMA variants of the solver inner loops.  This translation unit is the
// only one compiled with -mavx2 -mfma; callers reach it through the dispatch
// table, never directly, so the binary stays runnable on non-AVX2 hosts.

#include "dyadic/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace dyadic::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void rhs_avx2(const double* u, const double* nu_d, const double* la,
              const double* lb, const double* g, double* out, std::size_t n) {
    std::size_t i = 0;
    // Interior modes read both neighbours; i in [1, n-2] is safe for the
    // shifted loads, edges are finished by the scalar tail below.
    if (n >= 6) {
        for (i = 1; i + 4 < n; i += 4) {
            const __m256d ui = _mm256_loadu_pd(u + i);
            const __m256d up = _mm256_loadu_pd(u + i - 1);
            const __m256d un = _mm256_loadu_pd(u + i + 1);
            __m256d acc = g ? _mm256_loadu_pd(g + i) : _mm256_setzero_pd();
            acc = _mm256_fnmadd_pd(_mm256_loadu_pd(nu_d + i), ui, acc);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(la + i),
                                  _mm256_mul_pd(up, up), acc);
            acc = _mm256_fnmadd_pd(_mm256_loadu_pd(lb + i),
                                   _mm256_mul_pd(ui, un), acc);
            _mm256_storeu_pd(out + i, acc);
        }
    }
    auto scalar_at = [&](std::size_t k) {
        const double prev = k > 0 ? u[k - 1] : 0.0;
        const double next = k + 1 < n ? u[k + 1] : 0.0;
        const double gk = g ? g[k] : 0.0;
        out[k] = gk - nu_d[k] * u[k] + la[k] * prev * prev - lb[k] * u[k] * next;
    };
    scalar_at(0);
    for (std::size_t k = (n >= 6 ? i : 1); k < n; ++k) scalar_at(k);
}

double weighted_sumsq_avx2(const double* w, const double* u, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    if (w) {
        for (; i + 4 <= n; i += 4) {
            const __m256d ui = _mm256_loadu_pd(u + i);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i),
                                  _mm256_mul_pd(ui, ui), acc);
        }
    } else {
        for (; i + 4 <= n; i += 4) {
            const __m256d ui = _mm256_loadu_pd(u + i);
            acc = _mm256_fmadd_pd(ui, ui, acc);
        }
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += (w ? w[i] : 1.0) * u[i] * u[i];
    return s;
}

double weighted_dot_avx2(const double* w, const double* a, const double* b,
                         std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    if (w) {
        for (; i + 4 <= n; i += 4) {
            const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), ab, acc);
        }
    } else {
        for (; i + 4 <= n; i += 4) {
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                                  _mm256_loadu_pd(b + i), acc);
        }
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += (w ? w[i] : 1.0) * a[i] * b[i];
    return s;
}

double weighted_triple_avx2(const double* w, const double* u, std::size_t n) {
    if (n < 2) return 0.0;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 5 <= n; i += 4) {
        const __m256d ui = _mm256_loadu_pd(u + i);
        const __m256d un = _mm256_loadu_pd(u + i + 1);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i),
                              _mm256_mul_pd(_mm256_mul_pd(ui, ui), un), acc);
    }
    double s = hsum(acc);
    for (; i + 1 < n; ++i) s += w[i] * u[i] * u[i] * u[i + 1];
    return s;
}

void axpy_avx2(double s, const double* x, double* y, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d yi = _mm256_fmadd_pd(sv, _mm256_loadu_pd(x + i),
                                           _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < n; ++i) y[i] += s * x[i];
}

void scaled_mul_add_avx2(double s, const double* q, const double* x, double* y,
                         std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d qx = _mm256_mul_pd(_mm256_loadu_pd(q + i),
                                         _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(sv, qx, _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += s * q[i] * x[i];
}

void hadamard_avx2(const double* p, const double* x, double* y,
                   std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(
            y + i, _mm256_mul_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) y[i] = p[i] * x[i];
}

double min_element_avx2(const double* u, std::size_t n) {
    std::size_t i = 0;
    double m = u[0];
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(u);
        for (i = 4; i + 4 <= n; i += 4)
            acc = _mm256_min_pd(acc, _mm256_loadu_pd(u + i));
        __m128d lo = _mm_min_pd(_mm256_castpd256_pd128(acc),
                                _mm256_extractf128_pd(acc, 1));
        m = _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
    }
    for (; i < n; ++i)
        if (u[i] < m) m = u[i];
    return m;
}

}  // namespace

const ops* avx2_table_if_built() {
    static const ops table = {
        rhs_avx2,          weighted_sumsq_avx2, weighted_dot_avx2,
        weighted_triple_avx2, axpy_avx2,        scaled_mul_add_avx2,
        hadamard_avx2,     min_element_avx2,    "avx2",
    };
    return &table;
}

}  // namespace dyadic::kernels

#else

namespace dyadic::kernels {
const ops* avx2_table_if_built() { return nullptr; }
}  // namespace dyadic::kernels

#endif
