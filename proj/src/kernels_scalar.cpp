#include "dyadic/kernels.hpp"

namespace dyadic::kernels {
namespace {

void rhs_scalar(const double* u, const double* nu_d, const double* la,
                const double* lb, const double* g, double* out,
                std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = i > 0 ? u[i - 1] : 0.0;
        const double next = i + 1 < n ? u[i + 1] : 0.0;
        const double gi = g ? g[i] : 0.0;
        out[i] = gi - nu_d[i] * u[i] + la[i] * prev * prev - lb[i] * u[i] * next;
    }
}

double weighted_sumsq_scalar(const double* w, const double* u, std::size_t n) {
    double acc = 0.0;
    if (w) {
        for (std::size_t i = 0; i < n; ++i) acc += w[i] * u[i] * u[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) acc += u[i] * u[i];
    }
    return acc;
}

double weighted_dot_scalar(const double* w, const double* a, const double* b,
                           std::size_t n) {
    double acc = 0.0;
    if (w) {
        for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * b[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    }
    return acc;
}

double weighted_triple_scalar(const double* w, const double* u, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += w[i] * u[i] * u[i] * u[i + 1];
    return acc;
}

void axpy_scalar(double s, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void scaled_mul_add_scalar(double s, const double* q, const double* x,
                           double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += s * q[i] * x[i];
}

void hadamard_scalar(const double* p, const double* x, double* y,
                     std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = p[i] * x[i];
}

double min_element_scalar(const double* u, std::size_t n) {
    double m = u[0];
    for (std::size_t i = 1; i < n; ++i)
        if (u[i] < m) m = u[i];
    return m;
}

}  // namespace

const ops& scalar_ops() {
    static const ops table = {
        rhs_scalar,          weighted_sumsq_scalar, weighted_dot_scalar,
        weighted_triple_scalar, axpy_scalar,        scaled_mul_add_scalar,
        hadamard_scalar,     min_element_scalar,    "scalar",
    };
    return table;
}

}  // namespace dyadic::kernels
