#pragma once

#include <stegocap/core.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace stegocap {

enum class EosPolicy {
    Suppress,  // drop EOS from the distribution while payload bits remain
    Strict,    // keep EOS; selecting it with bits remaining is CapacityExceeded
};

struct PoolParams {
    double t_a = 0.0;  // absolute floor
    double t_r = 1.0;  // allowed gap below the top probability
    std::optional<std::size_t> max_pool_size;
    EosPolicy eos_policy = EosPolicy::Suppress;

    // Throws Error{InvalidParams} unless 0 <= t_a < 1, 0 < t_r <= 1 and
    // max_pool_size >= 1 when set.
    void validate() const;
};

/// Admissible tokens at one step, sorted by descending probability then
/// ascending id. Never empty.
class CandidatePool {
public:
    // Canonicalizes order; throws Error{EmptyDistribution} on empty input and
    // Error{NegativeProbability} on non-positive probabilities.
    static CandidatePool from_entries(std::span<const ProbEntry> entries);

    std::size_t size() const noexcept { return ids_.size(); }
    std::span<const TokenId> ids() const noexcept { return ids_; }
    std::span<const double> probs() const noexcept { return probs_; }
    ProbEntry operator[](std::size_t i) const { return {ids_[i], probs_[i]}; }
    bool contains(TokenId id) const noexcept;

    friend bool operator==(const CandidatePool&, const CandidatePool&) = default;

private:
    CandidatePool(std::vector<TokenId> ids, std::vector<double> probs)
        : ids_(std::move(ids)), probs_(std::move(probs)) {}

    friend CandidatePool semantic_pool(const NextTokenDistribution&, const PoolParams&, bool,
                                       std::optional<TokenId>);
    friend CandidatePool topk_pool(const NextTokenDistribution&, std::size_t);

    std::vector<TokenId> ids_;
    std::vector<double> probs_;
};

/// Two-parameter rule: keeps w with p(w) > max(t_a, p_top - t_r), where p_top
/// is the largest probability after optional EOS removal. When nothing clears
/// the bar the argmax token is returned alone. Throws Error{EmptyDistribution}
/// if the distribution is empty after EOS removal.
CandidatePool semantic_pool(const NextTokenDistribution& dist, const PoolParams& params,
                            bool suppress_eos, std::optional<TokenId> eos_id);

/// The k most probable tokens (fewer if the support is smaller).
CandidatePool topk_pool(const NextTokenDistribution& dist, std::size_t k);

}  // namespace stegocap
