// Built with -mavx2 only; nothing here may run before cpu_supports_avx2().

#include <stegocap/simd/kernels.hpp>

#include <immintrin.h>

#include <bit>

namespace stegocap::simd {
namespace {

void quantize6_avx2(const double* in, double* out, std::size_t n) {
    const __m256d scale = _mm256_set1_pd(1e6);
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        __m256d v = _mm256_mul_pd(_mm256_loadu_pd(in + i), scale);
        v = _mm256_round_pd(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        _mm256_storeu_pd(out + i, _mm256_div_pd(v, scale));
    }
    for (std::size_t i = body; i < n; ++i) {
        __m128d v = _mm_mul_sd(_mm_set_sd(in[i]), _mm_set_sd(1e6));
        v = _mm_round_sd(v, v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        out[i] = _mm_cvtsd_f64(_mm_div_sd(v, _mm_set_sd(1e6)));
    }
}

double lane_sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (std::size_t i = body; i < n; ++i) {
        total += x[i];
    }
    return total;
}

std::size_t count_greater_avx2(const double* x, std::size_t n, double threshold) {
    const __m256d t = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(x + i), t, _CMP_GT_OQ);
        count += static_cast<std::size_t>(
            std::popcount(static_cast<unsigned>(_mm256_movemask_pd(gt))));
    }
    for (std::size_t i = body; i < n; ++i) {
        count += x[i] > threshold ? 1 : 0;
    }
    return count;
}

void smooth_counts_avx2(const std::uint32_t* counts, double alpha, double denom, double* out,
                        std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    const __m256d d = _mm256_set1_pd(denom);
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        const __m128i c = _mm_loadu_si128(reinterpret_cast<const __m128i*>(counts + i));
        const __m256d v = _mm256_add_pd(_mm256_cvtepi32_pd(c), a);
        _mm256_storeu_pd(out + i, _mm256_div_pd(v, d));
    }
    for (std::size_t i = body; i < n; ++i) {
        out[i] = (static_cast<double>(counts[i]) + alpha) / denom;
    }
}

void divide_avx2(const double* in, double divisor, double* out, std::size_t n) {
    const __m256d d = _mm256_set1_pd(divisor);
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(in + i), d));
    }
    for (std::size_t i = body; i < n; ++i) {
        out[i] = in[i] / divisor;
    }
}

constexpr KernelTable kAvx2{
    "avx2", quantize6_avx2, lane_sum_avx2, count_greater_avx2, smooth_counts_avx2, divide_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() noexcept { return &kAvx2; }

}  // namespace stegocap::simd
