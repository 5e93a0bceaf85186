#include <stegocap/core.hpp>

#include <stegocap/error.hpp>
#include <stegocap/simd/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stegocap {

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::optional<TokenId> eos_id)
    : tokens_(std::move(tokens)), eos_id_(eos_id) {
    if (tokens_.empty()) {
        throw Error(ErrorCode::InvalidParams, "vocabulary is empty");
    }
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
            throw Error(ErrorCode::DuplicateToken, "vocabulary token '" + tokens_[i] + "' repeated");
        }
    }
    if (eos_id_ && *eos_id_ >= tokens_.size()) {
        throw Error(ErrorCode::IdOutOfRange, "eos id " + std::to_string(*eos_id_) + " outside vocabulary");
    }
}

const std::string& Vocabulary::token(TokenId id) const {
    if (id >= tokens_.size()) {
        throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(id));
    }
    return tokens_[id];
}

std::optional<TokenId> Vocabulary::find(const std::string& token) const {
    if (auto it = index_.find(token); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::vector<ProbEntry> NextTokenDistribution::entries() const {
    std::vector<ProbEntry> out(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        out[i] = {ids_[i], probs_[i]};
    }
    return out;
}

double NextTokenDistribution::probability_of(TokenId id) const noexcept {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i] == id) {
            return probs_[i];
        }
    }
    return 0.0;
}

double NextTokenDistribution::total_mass() const noexcept { return simd::lane_sum(probs_); }

void sort_canonical(std::vector<TokenId>& ids, std::vector<double>& probs) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) {
            return probs[a] > probs[b];
        }
        return ids[a] < ids[b];
    });
    std::vector<TokenId> sorted_ids(ids.size());
    std::vector<double> sorted_probs(probs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_ids[i] = ids[order[i]];
        sorted_probs[i] = probs[order[i]];
    }
    ids = std::move(sorted_ids);
    probs = std::move(sorted_probs);
}

NextTokenDistribution validate_distribution(std::span<const ProbEntry> raw, std::size_t vocab_size,
                                            MassMode mode) {
    if (raw.empty()) {
        throw Error(ErrorCode::EmptyDistribution, "no entries");
    }
    std::vector<TokenId> ids;
    std::vector<double> probs;
    ids.reserve(raw.size());
    probs.reserve(raw.size());
    for (const ProbEntry& e : raw) {
        if (!(e.prob >= 0.0) || !std::isfinite(e.prob)) {
            throw Error(ErrorCode::NegativeProbability,
                        "token " + std::to_string(e.id) + " has probability " + std::to_string(e.prob));
        }
        if (e.id >= vocab_size) {
            throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(e.id) +
                                                     " >= vocabulary size " + std::to_string(vocab_size));
        }
        ids.push_back(e.id);
        probs.push_back(e.prob);
    }

    std::vector<TokenId> seen = ids;
    std::sort(seen.begin(), seen.end());
    if (auto dup = std::adjacent_find(seen.begin(), seen.end()); dup != seen.end()) {
        throw Error(ErrorCode::DuplicateToken, "token id " + std::to_string(*dup) + " repeated");
    }

    const double mass = simd::lane_sum(probs);
    if (mass > 1.0 + kMassTolerance || (mode == MassMode::Dense && mass < 1.0 - kMassTolerance)) {
        throw Error(ErrorCode::MassOutOfBounds, "total probability " + std::to_string(mass));
    }

    sort_canonical(ids, probs);
    NextTokenDistribution dist;
    dist.ids_ = std::move(ids);
    dist.probs_ = std::move(probs);
    return dist;
}

NextTokenDistribution quantize(const NextTokenDistribution& dist) {
    std::vector<double> rounded(dist.size());
    simd::quantize6(dist.probs_, rounded);

    NextTokenDistribution out;
    out.ids_.reserve(dist.size());
    out.probs_.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (rounded[i] > 0.0) {
            out.ids_.push_back(dist.ids_[i]);
            out.probs_.push_back(rounded[i]);
        }
    }
    // Rounding can merge neighbours into ties, which must then order by id.
    sort_canonical(out.ids_, out.probs_);
    return out;
}

NextTokenDistribution without_token(const NextTokenDistribution& dist, TokenId id) {
    NextTokenDistribution out;
    out.ids_.reserve(dist.size());
    out.probs_.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.ids_[i] != id) {
            out.ids_.push_back(dist.ids_[i]);
            out.probs_.push_back(dist.probs_[i]);
        }
    }
    return out;
}

}  // namespace stegocap
