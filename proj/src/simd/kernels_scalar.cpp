#include <stegocap/simd/kernels.hpp>

#include <cmath>

namespace stegocap::simd {
namespace {

void quantize6_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::nearbyint(in[i] * 1e6) / 1e6;
    }
}

double lane_sum_scalar(const double* x, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        acc[0] += x[i];
        acc[1] += x[i + 1];
        acc[2] += x[i + 2];
        acc[3] += x[i + 3];
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = body; i < n; ++i) {
        total += x[i];
    }
    return total;
}

std::size_t count_greater_scalar(const double* x, std::size_t n, double threshold) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        count += x[i] > threshold ? 1 : 0;
    }
    return count;
}

void smooth_counts_scalar(const std::uint32_t* counts, double alpha, double denom, double* out,
                          std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (static_cast<double>(counts[i]) + alpha) / denom;
    }
}

void divide_scalar(const double* in, double divisor, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = in[i] / divisor;
    }
}

constexpr KernelTable kScalar{
    "scalar", quantize6_scalar, lane_sum_scalar, count_greater_scalar, smooth_counts_scalar,
    divide_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace stegocap::simd
