#include <stegocap/simd/kernels.hpp>

#include <cstdlib>
#include <string_view>

namespace stegocap::simd {

#if !defined(STEGOCAP_HAVE_AVX2)
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

bool cpu_supports_avx2() noexcept {
#if defined(STEGOCAP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

const KernelTable& select_kernels() noexcept {
    if (const char* env = std::getenv("STEGOCAP_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
        return scalar_kernels();
    }
    if (const KernelTable* avx2 = avx2_kernels(); avx2 != nullptr && cpu_supports_avx2()) {
        return *avx2;
    }
    return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() noexcept {
    static const KernelTable& table = select_kernels();
    return table;
}

}  // namespace stegocap::simd
