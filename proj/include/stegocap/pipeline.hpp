#pragma once

#include <stegocap/coding.hpp>
#include <stegocap/models.hpp>
#include <stegocap/pooling.hpp>

#include <cstddef>
#include <vector>

namespace stegocap {

/// How each step's candidate pool is formed.
struct PoolStrategy {
    enum class Kind { Semantic, TopK };

    Kind kind = Kind::Semantic;
    std::size_t k = 0;  // TopK only

    static PoolStrategy semantic() { return {Kind::Semantic, 0}; }
    static PoolStrategy top_k(std::size_t k) { return {Kind::TopK, k}; }
};

enum class CodingScheme { Huffman };

struct StegoParams {
    PoolParams pool;
    std::size_t max_len = kDefaultMaxLen;
    PoolStrategy strategy = PoolStrategy::semantic();
    CodingScheme coding = CodingScheme::Huffman;

    void validate() const;
};

struct StepRecord {
    TokenId token = 0;
    std::size_t pool_size = 0;  // 0 on argmax continuation steps
    Bits codeword;              // bits consumed at this step
    double token_prob = 0.0;    // quantized model probability of `token`
    bool embedding = false;
};

struct StegoOutput {
    std::vector<TokenId> tokens;
    std::vector<StepRecord> steps;
    std::size_t gross_bits = 0;    // framed bits consumed, padding included
    std::size_t payload_bits = 0;  // L
};

struct HideAttempt {
    StegoOutput output;
    bool complete = false;  // every framed bit was embedded
};

/// The candidate pool hide/extract use for one distribution.
CandidatePool build_pool(const NextTokenDistribution& dist, const StegoParams& params,
                         bool bits_remaining, std::optional<TokenId> eos_id);

/// Embeds the framed payload token by token, then continues greedily until
/// EOS or max_len. Returns whatever was generated even if the payload did
/// not fit.
HideAttempt try_hide(ModelSession& session, const BitMessage& payload, const StegoParams& params);

/// try_hide, but throws Error{CapacityExceeded} when the payload did not fit.
StegoOutput hide(ModelSession& session, const BitMessage& payload, const StegoParams& params);

/// Re-derives each step's pool and code from a fresh session and reads the
/// payload back. Throws Error{TokenNotInPool} on a sender/receiver mismatch
/// and Error{IncompleteMessage} if the tokens run out first.
BitMessage extract(ModelSession& session, std::span<const TokenId> tokens, const StegoParams& params);

}  // namespace stegocap
