#include <cstdlib>
#include <string_view>

#include "ridge/simd.hpp"

namespace ridge::simd {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable& select() {
    const char* forced = std::getenv("RIDGE_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const KernelTable* avx = avx2_kernels(); avx != nullptr && cpu_has_avx2_fma()) return *avx;
    return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace ridge::simd
