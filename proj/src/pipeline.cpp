#include <stegocap/pipeline.hpp>

#include <stegocap/error.hpp>

namespace stegocap {

void StegoParams::validate() const {
    pool.validate();
    if (max_len == 0) {
        throw Error(ErrorCode::InvalidParams, "max_len must be positive");
    }
    if (strategy.kind == PoolStrategy::Kind::TopK && strategy.k == 0) {
        throw Error(ErrorCode::InvalidParams, "top-k pool needs k >= 1");
    }
}

CandidatePool build_pool(const NextTokenDistribution& dist, const StegoParams& params,
                         bool bits_remaining, std::optional<TokenId> eos_id) {
    const bool suppress =
        bits_remaining && eos_id.has_value() && params.pool.eos_policy == EosPolicy::Suppress;
    if (params.strategy.kind == PoolStrategy::Kind::TopK) {
        return topk_pool(suppress ? without_token(dist, *eos_id) : dist, params.strategy.k);
    }
    return semantic_pool(dist, params.pool, suppress, eos_id);
}

HideAttempt try_hide(ModelSession& session, const BitMessage& payload, const StegoParams& params) {
    params.validate();
    if (session.step() != 0) {
        throw Error(ErrorCode::InvalidParams, "hide needs a fresh session");
    }
    FramedStream stream = frame(payload);
    const std::optional<TokenId> eos = session.eos_id();

    HideAttempt result;
    StegoOutput& out = result.output;
    out.payload_bits = payload.length_bits();
    std::optional<TokenId> last;
    while (out.tokens.size() < params.max_len) {
        const NextTokenDistribution dist = session.next_distribution(last);
        StepRecord record;
        if (!stream.exhausted()) {
            const CandidatePool pool = build_pool(dist, params, true, eos);
            const HuffmanCode code = build_canonical_huffman(pool);
            const EmbedResult picked = embed_step(code, stream);
            record.token = picked.token;
            record.pool_size = pool.size();
            record.codeword = decode_step(code, picked.token);
            record.embedding = true;
            out.gross_bits += picked.consumed;
        } else {
            record.token = dist.ids().front();
        }
        record.token_prob = dist.probability_of(record.token);
        out.tokens.push_back(record.token);
        out.steps.push_back(std::move(record));
        last = out.tokens.back();
        if (eos && *last == *eos) {
            break;
        }
    }
    result.complete = stream.exhausted();
    return result;
}

StegoOutput hide(ModelSession& session, const BitMessage& payload, const StegoParams& params) {
    HideAttempt attempt = try_hide(session, payload, params);
    if (!attempt.complete) {
        throw Error(ErrorCode::CapacityExceeded,
                    std::to_string(attempt.output.gross_bits) + " of " +
                        std::to_string(kHeaderBits + payload.length_bits()) +
                        " framed bits embedded in " + std::to_string(attempt.output.tokens.size()) +
                        " tokens");
    }
    return std::move(attempt.output);
}

BitMessage extract(ModelSession& session, std::span<const TokenId> tokens, const StegoParams& params) {
    params.validate();
    if (session.step() != 0) {
        throw Error(ErrorCode::InvalidParams, "extract needs a fresh session");
    }
    const std::optional<TokenId> eos = session.eos_id();
    Bits accumulated;
    std::optional<TokenId> last;
    for (const TokenId token : tokens) {
        const NextTokenDistribution dist = session.next_distribution(last);
        const CandidatePool pool = build_pool(dist, params, true, eos);
        const HuffmanCode code = build_canonical_huffman(pool);
        const Bits& bits = decode_step(code, token);
        accumulated.insert(accumulated.end(), bits.begin(), bits.end());
        if (std::optional<BitMessage> payload = deframe(accumulated)) {
            return std::move(*payload);
        }
        last = token;
    }
    throw Error(ErrorCode::IncompleteMessage,
                std::to_string(accumulated.size()) + " bits recovered from " +
                    std::to_string(tokens.size()) + " tokens");
}

}  // namespace stegocap
