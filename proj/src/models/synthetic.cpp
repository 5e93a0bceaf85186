#include <stegocap/models.hpp>

#include <stegocap/error.hpp>
#include <stegocap/simd/kernels.hpp>

#include <charconv>
#include <cmath>
#include <numeric>

namespace stegocap {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
    std::uint64_t s = h ^ (v + 0x632BE59BD9B4E019ULL);
    return splitmix64(s);
}

// Portable draws; std distributions differ between standard libraries.
class Stream {
public:
    explicit Stream(std::uint64_t key) : state_(key) {}
    std::uint64_t next() noexcept { return splitmix64(state_); }
    double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) noexcept {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

std::vector<std::string> synthetic_tokens(std::size_t n) {
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        tokens.push_back("t" + std::to_string(i));
    }
    tokens.emplace_back("</s>");
    return tokens;
}

class SyntheticBackend final : public Backend {
public:
    SyntheticBackend(const SyntheticConfig& config, const Conditioning& conditioning)
        : config_(config),
          vocab_(synthetic_tokens(config.vocab_size),
                 static_cast<TokenId>(config.vocab_size - 1)) {
        base_key_ = mix(0x5EED5EED5EED5EEDULL, config.seed);
        for (unsigned char c : conditioning.payload) {
            base_key_ = mix(base_key_, c);
        }
        base_key_ = mix(base_key_, conditioning.payload.size());
    }

    const Vocabulary& vocabulary() const override { return vocab_; }

    NextTokenDistribution distribution(std::span<const TokenId> context) override {
        std::uint64_t key = base_key_;
        for (TokenId t : context) {
            key = mix(key, t);
        }
        key = mix(key, context.size());
        Stream rng(key);

        const std::size_t v = config_.vocab_size;
        std::vector<ProbEntry> raw;
        if (config_.shape == SyntheticConfig::Shape::Uniform) {
            // k distinct non-EOS tokens, partial Fisher-Yates.
            std::vector<TokenId> ids(v - 1);
            std::iota(ids.begin(), ids.end(), TokenId{0});
            const double p = 1.0 / static_cast<double>(config_.uniform_k);
            for (std::size_t i = 0; i < config_.uniform_k; ++i) {
                std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
                raw.push_back({ids[i], p});
            }
        } else {
            std::vector<TokenId> ids(v);
            std::iota(ids.begin(), ids.end(), TokenId{0});
            for (std::size_t i = v - 1; i > 0; --i) {
                std::swap(ids[i], ids[rng.below(i + 1)]);
            }
            const double s = config_.exponent ? *config_.exponent : 0.8 + 0.8 * rng.unit();
            std::vector<double> weights(v);
            for (std::size_t r = 0; r < v; ++r) {
                weights[r] = std::pow(static_cast<double>(r + 1), -s);
            }
            const double total = simd::lane_sum(weights);
            simd::divide(weights, total, weights);
            raw.resize(v);
            for (std::size_t r = 0; r < v; ++r) {
                raw[r] = {ids[r], weights[r]};
            }
        }
        return validate_distribution(raw, v, MassMode::Dense);
    }

private:
    SyntheticConfig config_;
    Vocabulary vocab_;
    std::uint64_t base_key_ = 0;
};

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw Error(ErrorCode::UnknownBackend,
                    "synthetic option " + std::string(key) + "='" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

SyntheticConfig SyntheticConfig::parse(std::string_view options) {
    SyntheticConfig config;
    while (!options.empty()) {
        const std::size_t comma = options.find(',');
        const std::string_view item = options.substr(0, comma);
        options = comma == std::string_view::npos ? std::string_view{} : options.substr(comma + 1);
        if (item.empty()) {
            continue;
        }
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::UnknownBackend, "synthetic option '" + std::string(item) + "'");
        }
        const std::string_view key = item.substr(0, eq);
        const std::string_view value = item.substr(eq + 1);
        if (key == "seed") {
            config.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "vocab") {
            config.vocab_size = parse_number<std::size_t>(key, value);
        } else if (key == "s") {
            config.exponent = parse_number<double>(key, value);
        } else if (key == "shape") {
            if (value == "zipf") {
                config.shape = Shape::Zipf;
            } else if (value.starts_with("uniform-")) {
                config.shape = Shape::Uniform;
                config.uniform_k = parse_number<std::size_t>(key, value.substr(8));
            } else {
                throw Error(ErrorCode::UnknownBackend, "synthetic shape '" + std::string(value) + "'");
            }
        } else {
            throw Error(ErrorCode::UnknownBackend, "synthetic option '" + std::string(key) + "'");
        }
    }
    if (config.vocab_size < 2) {
        throw Error(ErrorCode::UnknownBackend, "synthetic vocab must hold at least 2 tokens");
    }
    if (config.shape == Shape::Uniform &&
        (config.uniform_k == 0 || config.uniform_k + 1 > config.vocab_size)) {
        throw Error(ErrorCode::UnknownBackend, "uniform-k needs 1 <= k < vocab");
    }
    if (config.exponent && !(*config.exponent > 0.0)) {
        throw Error(ErrorCode::UnknownBackend, "zipf exponent must be positive");
    }
    return config;
}

std::unique_ptr<Backend> make_synthetic_backend(const SyntheticConfig& config,
                                                const Conditioning& conditioning) {
    return std::make_unique<SyntheticBackend>(config, conditioning);
}

}  // namespace stegocap
