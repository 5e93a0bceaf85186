#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stegocap {

using TokenId = std::uint32_t;

struct ProbEntry {
    TokenId id = 0;
    double prob = 0.0;

    friend bool operator==(const ProbEntry&, const ProbEntry&) = default;
};

/// Ordered token strings plus an optional end-of-sequence id.
class Vocabulary {
public:
    Vocabulary(std::vector<std::string> tokens, std::optional<TokenId> eos_id);

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::string& token(TokenId id) const;
    std::optional<TokenId> find(const std::string& token) const;
    std::optional<TokenId> eos_id() const noexcept { return eos_id_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
    std::optional<TokenId> eos_id_;
};

enum class MassMode {
    Dense,   // total mass within 1e-6 of 1
    Sparse,  // top-N source, total mass at most 1 + 1e-6
};

inline constexpr double kMassTolerance = 1e-6;

/// Next-token probabilities at one generation step, held as parallel id and
/// probability arrays sorted by descending probability, ties by ascending id.
/// Omitted ids have probability zero.
class NextTokenDistribution {
public:
    NextTokenDistribution() = default;

    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    std::span<const TokenId> ids() const noexcept { return ids_; }
    std::span<const double> probs() const noexcept { return probs_; }
    ProbEntry operator[](std::size_t i) const { return {ids_[i], probs_[i]}; }
    std::vector<ProbEntry> entries() const;

    // Zero when the id is not in the support.
    double probability_of(TokenId id) const noexcept;
    double total_mass() const noexcept;

    friend bool operator==(const NextTokenDistribution&, const NextTokenDistribution&) = default;

private:
    friend NextTokenDistribution validate_distribution(std::span<const ProbEntry>, std::size_t,
                                                       MassMode);
    friend NextTokenDistribution quantize(const NextTokenDistribution&);
    friend NextTokenDistribution without_token(const NextTokenDistribution&, TokenId);

    std::vector<TokenId> ids_;
    std::vector<double> probs_;
};

/// Checks raw model output and returns it in canonical order. Throws
/// Error{NegativeProbability | DuplicateToken | IdOutOfRange | MassOutOfBounds
/// | EmptyDistribution}.
NextTokenDistribution validate_distribution(std::span<const ProbEntry> raw, std::size_t vocab_size,
                                            MassMode mode = MassMode::Dense);

/// Rounds every probability half-even to 6 decimals, drops zeros, re-sorts.
NextTokenDistribution quantize(const NextTokenDistribution& dist);

/// Copy of `dist` with `id` removed (no renormalization).
NextTokenDistribution without_token(const NextTokenDistribution& dist, TokenId id);

// Sorts parallel arrays by (prob desc, id asc).
void sort_canonical(std::vector<TokenId>& ids, std::vector<double>& probs);

}  // namespace stegocap
