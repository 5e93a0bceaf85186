#pragma once

// Vocabulary-width inner loops. Every kernel has a scalar reference and, on
// x86-64, an AVX2 variant; the variant is picked once at runtime. Both paths
// must produce bit-identical results, since sender and receiver may run on
// different machines and extraction re-derives every pool from these values.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace stegocap::simd {

struct KernelTable {
    std::string_view name;
    // out[i] = round_half_even(in[i] * 1e6) / 1e6
    void (*quantize6)(const double* in, double* out, std::size_t n);
    // Four interleaved partial sums combined as (s0 + s1) + (s2 + s3), then the
    // tail added in order. The scalar path follows the same order.
    double (*lane_sum)(const double* x, std::size_t n);
    // Number of x[i] with x[i] > threshold (NaN never counts).
    std::size_t (*count_greater)(const double* x, std::size_t n, double threshold);
    // out[i] = (double(counts[i]) + alpha) / denom; counts must be < 2^31.
    void (*smooth_counts)(const std::uint32_t* counts, double alpha, double denom, double* out,
                          std::size_t n);
    // out[i] = in[i] / divisor
    void (*divide)(const double* in, double divisor, double* out, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels() noexcept;

bool cpu_supports_avx2() noexcept;

// AVX2 when compiled in and supported by the CPU, unless the environment
// variable STEGOCAP_SIMD is set to "scalar".
const KernelTable& active_kernels() noexcept;

inline void quantize6(std::span<const double> in, std::span<double> out) {
    active_kernels().quantize6(in.data(), out.data(), in.size());
}

inline double lane_sum(std::span<const double> x) {
    return active_kernels().lane_sum(x.data(), x.size());
}

inline std::size_t count_greater(std::span<const double> x, double threshold) {
    return active_kernels().count_greater(x.data(), x.size(), threshold);
}

inline void smooth_counts(std::span<const std::uint32_t> counts, double alpha, double denom,
                          std::span<double> out) {
    active_kernels().smooth_counts(counts.data(), alpha, denom, out.data(), counts.size());
}

inline void divide(std::span<const double> in, double divisor, std::span<double> out) {
    active_kernels().divide(in.data(), divisor, out.data(), in.size());
}

}  // namespace stegocap::simd
