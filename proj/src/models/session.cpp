#include <stegocap/models.hpp>

#include <stegocap/error.hpp>

#include <array>

namespace stegocap {

ModelSession::ModelSession(std::unique_ptr<Backend> backend, std::size_t max_len)
    : backend_(std::move(backend)), max_len_(max_len) {
    if (!backend_) {
        throw Error(ErrorCode::BackendUnavailable, "null backend");
    }
    if (max_len_ == 0) {
        throw Error(ErrorCode::InvalidParams, "max_len must be positive");
    }
}

NextTokenDistribution ModelSession::next_distribution(std::optional<TokenId> last_token) {
    if (last_token.has_value() != (step_ > 0)) {
        throw Error(ErrorCode::InvalidParams, step_ == 0 ? "step 0 takes no previous token"
                                                         : "previous token required after step 0");
    }
    if (last_token) {
        if (*last_token >= vocabulary().size()) {
            throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(*last_token));
        }
        if (context_.size() >= max_len_) {
            throw Error(ErrorCode::StepLimitExceeded,
                        "context already holds " + std::to_string(context_.size()) + " tokens");
        }
        context_.push_back(*last_token);
    }
    ++step_;
    return quantize(backend_->distribution(context_));
}

namespace {

std::pair<std::string_view, std::string_view> split_kind(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) {
        return {spec, {}};
    }
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

}  // namespace

std::unique_ptr<Backend> make_backend(std::string_view backend_spec,
                                      const Conditioning& conditioning) {
    const auto [kind, rest] = split_kind(backend_spec);
    if (kind == "toy") {
        return make_toy_backend(conditioning);
    }
    if (kind == "synthetic") {
        return make_synthetic_backend(SyntheticConfig::parse(rest), conditioning);
    }
    if (kind == "replay") {
        return make_replay_backend(std::string(rest));
    }
    if (kind == "bridge") {
        return make_bridge_backend(std::string(rest), conditioning);
    }
    throw Error(ErrorCode::UnknownBackend, "'" + std::string(backend_spec) + "'");
}

ModelSession open_session(std::string_view backend_spec, const Conditioning& conditioning,
                          std::size_t max_len) {
    return ModelSession(make_backend(backend_spec, conditioning), max_len);
}

Conditioning default_conditioning(std::string_view backend_spec, std::size_t sample_index) {
    const auto kind = split_kind(backend_spec).first;
    if (kind == "toy") {
        const std::vector<std::string> topics = toy_topics();
        return {topics[sample_index % topics.size()]};
    }
    if (kind == "synthetic") {
        return {"sample-" + std::to_string(sample_index)};
    }
    return {};
}

namespace {

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = (std::uint32_t(std::uint8_t(bytes[i])) << 16) |
                                (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8) |
                                std::uint32_t(std::uint8_t(bytes[i + 2]));
        out.push_back(kBase64Alphabet[(v >> 18) & 63]);
        out.push_back(kBase64Alphabet[(v >> 12) & 63]);
        out.push_back(kBase64Alphabet[(v >> 6) & 63]);
        out.push_back(kBase64Alphabet[v & 63]);
    }
    const std::size_t rem = bytes.size() - i;
    if (rem > 0) {
        std::uint32_t v = std::uint32_t(std::uint8_t(bytes[i])) << 16;
        if (rem == 2) {
            v |= std::uint32_t(std::uint8_t(bytes[i + 1])) << 8;
        }
        out.push_back(kBase64Alphabet[(v >> 18) & 63]);
        out.push_back(kBase64Alphabet[(v >> 12) & 63]);
        out.push_back(rem == 2 ? kBase64Alphabet[(v >> 6) & 63] : '=');
        out.push_back('=');
    }
    return out;
}

std::string base64_decode(std::string_view text) {
    std::array<int, 256> lookup;
    lookup.fill(-1);
    for (std::size_t i = 0; i < kBase64Alphabet.size(); ++i) {
        lookup[std::uint8_t(kBase64Alphabet[i])] = static_cast<int>(i);
    }
    if (text.size() % 4 != 0) {
        throw Error(ErrorCode::InvalidParams, "base64 length not a multiple of 4");
    }
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            const char c = text[i + static_cast<std::size_t>(j)];
            if (c == '=' && i + 4 == text.size() && j >= 2) {
                vals[j] = 0;
                ++pad;
            } else if (pad > 0 || (vals[j] = lookup[std::uint8_t(c)]) < 0) {
                throw Error(ErrorCode::InvalidParams, "bad base64 input");
            }
        }
        const std::uint32_t v = (std::uint32_t(vals[0]) << 18) | (std::uint32_t(vals[1]) << 12) |
                                (std::uint32_t(vals[2]) << 6) | std::uint32_t(vals[3]);
        out.push_back(static_cast<char>((v >> 16) & 0xFF));
        if (pad < 2) {
            out.push_back(static_cast<char>((v >> 8) & 0xFF));
        }
        if (pad < 1) {
            out.push_back(static_cast<char>(v & 0xFF));
        }
    }
    return out;
}

}  // namespace stegocap
