#include "dyadic/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace dyadic::kernels {

// Defined in kernels_avx2.cpp; returns nullptr when the build lacks AVX2.
const ops* avx2_table_if_built();

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const ops* select() {
    if (const char* env = std::getenv("DYADIC_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0 && avx2_ops()) return avx2_ops();
    }
    if (cpu_has_avx2_fma() && avx2_table_if_built())
        return avx2_table_if_built();
    return &scalar_ops();
}

}  // namespace

const ops* avx2_ops() {
    return cpu_has_avx2_fma() ? avx2_table_if_built() : nullptr;
}

const ops& active() {
    static const ops* chosen = select();
    return *chosen;
}

}  // namespace dyadic::kernels
