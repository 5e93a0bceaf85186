#include <stegocap/pooling.hpp>

#include <stegocap/error.hpp>
#include <stegocap/simd/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace stegocap {

void PoolParams::validate() const {
    if (!(t_a >= 0.0 && t_a < 1.0)) {
        throw Error(ErrorCode::InvalidParams, "t_a must be in [0, 1), got " + std::to_string(t_a));
    }
    if (!(t_r > 0.0 && t_r <= 1.0)) {
        throw Error(ErrorCode::InvalidParams, "t_r must be in (0, 1], got " + std::to_string(t_r));
    }
    if (max_pool_size && *max_pool_size == 0) {
        throw Error(ErrorCode::InvalidParams, "max_pool_size must be positive");
    }
}

CandidatePool CandidatePool::from_entries(std::span<const ProbEntry> entries) {
    if (entries.empty()) {
        throw Error(ErrorCode::EmptyDistribution, "candidate pool needs at least one token");
    }
    std::vector<TokenId> ids;
    std::vector<double> probs;
    for (const ProbEntry& e : entries) {
        if (!(e.prob > 0.0) || !std::isfinite(e.prob)) {
            throw Error(ErrorCode::NegativeProbability, "pool probabilities must be positive");
        }
        ids.push_back(e.id);
        probs.push_back(e.prob);
    }
    std::vector<TokenId> seen = ids;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw Error(ErrorCode::DuplicateToken, "pool token repeated");
    }
    sort_canonical(ids, probs);
    return CandidatePool(std::move(ids), std::move(probs));
}

bool CandidatePool::contains(TokenId id) const noexcept {
    return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

CandidatePool semantic_pool(const NextTokenDistribution& dist, const PoolParams& params,
                            bool suppress_eos, std::optional<TokenId> eos_id) {
    params.validate();
    if (suppress_eos && !eos_id) {
        throw Error(ErrorCode::InvalidParams, "EOS suppression requested without an EOS id");
    }
    const NextTokenDistribution source = suppress_eos ? without_token(dist, *eos_id) : dist;
    if (source.empty()) {
        throw Error(ErrorCode::EmptyDistribution, "nothing left after EOS suppression");
    }

    const std::span<const double> probs = source.probs();
    const double top = probs.front();
    const double threshold = std::max(params.t_a, top - params.t_r);
    // Sorted descending, so the admitted set is the prefix of this length.
    std::size_t admitted = simd::count_greater(probs, threshold);
    if (admitted == 0) {
        admitted = 1;
    }
    if (params.max_pool_size) {
        admitted = std::min(admitted, *params.max_pool_size);
    }

    const std::span<const TokenId> ids = source.ids();
    return CandidatePool(std::vector<TokenId>(ids.begin(), ids.begin() + admitted),
                         std::vector<double>(probs.begin(), probs.begin() + admitted));
}

CandidatePool topk_pool(const NextTokenDistribution& dist, std::size_t k) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidParams, "k must be positive");
    }
    if (dist.empty()) {
        throw Error(ErrorCode::EmptyDistribution, "empty distribution");
    }
    const std::size_t n = std::min(k, dist.size());
    const std::span<const TokenId> ids = dist.ids();
    const std::span<const double> probs = dist.probs();
    return CandidatePool(std::vector<TokenId>(ids.begin(), ids.begin() + n),
                         std::vector<double>(probs.begin(), probs.begin() + n));
}

}  // namespace stegocap
