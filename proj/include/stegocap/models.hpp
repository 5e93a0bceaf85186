#pragma once

#include <stegocap/core.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stegocap {

/// Opaque conditioning bytes standing in for the cover image: a topic name
/// for the toy model, extra seed material for the synthetic model, whatever
/// the adapter expects for a bridge.
struct Conditioning {
    std::string payload;
};

/// A deterministic next-token source. distribution() must be a pure function
/// of the backend configuration, the conditioning it was built with and the
/// context.
class Backend {
public:
    virtual ~Backend() = default;

    virtual const Vocabulary& vocabulary() const = 0;
    virtual MassMode mass_mode() const { return MassMode::Dense; }
    // Validated but not yet quantized.
    virtual NextTokenDistribution distribution(std::span<const TokenId> context) = 0;
};

inline constexpr std::size_t kDefaultMaxLen = 64;

/// One generation: a backend plus the tokens emitted so far.
class ModelSession {
public:
    ModelSession(std::unique_ptr<Backend> backend, std::size_t max_len = kDefaultMaxLen);

    const Vocabulary& vocabulary() const noexcept { return backend_->vocabulary(); }
    std::optional<TokenId> eos_id() const noexcept { return vocabulary().eos_id(); }
    std::size_t step() const noexcept { return step_; }
    std::size_t max_len() const noexcept { return max_len_; }
    std::span<const TokenId> context() const noexcept { return context_; }

    /// Appends `last_token` (absent exactly at step 0) and returns the
    /// quantized distribution for the next position. Throws
    /// Error{StepLimitExceeded} once the context reaches max_len.
    NextTokenDistribution next_distribution(std::optional<TokenId> last_token);

private:
    std::unique_ptr<Backend> backend_;
    std::size_t max_len_;
    std::vector<TokenId> context_;
    std::size_t step_ = 0;
};

/// Backend spec strings:
///   toy
///   synthetic[:key=value,...]   keys: seed, shape (zipf | uniform-K), vocab, s
///   replay:<path>
///   bridge:<shell command>
/// Throws Error{UnknownBackend} for an unrecognized kind and
/// Error{BackendUnavailable} when the backend cannot be brought up.
ModelSession open_session(std::string_view backend_spec, const Conditioning& conditioning,
                          std::size_t max_len = kDefaultMaxLen);

std::unique_ptr<Backend> make_backend(std::string_view backend_spec,
                                      const Conditioning& conditioning);

/// Conditioning used for the i-th sample of a sweep when none is supplied.
Conditioning default_conditioning(std::string_view backend_spec, std::size_t sample_index);

// --- toy trigram ----------------------------------------------------------

/// Topic names in the bundled corpus, in file order.
std::vector<std::string> toy_topics();

/// Word-level trigram, Laplace alpha = 1, trained on the sentences of one
/// topic (all topics when the conditioning is empty).
std::unique_ptr<Backend> make_toy_backend(const Conditioning& conditioning);

// --- synthetic --------------------------------------------------------------

struct SyntheticConfig {
    enum class Shape { Zipf, Uniform };

    std::uint64_t seed = 0;
    Shape shape = Shape::Zipf;
    std::size_t uniform_k = 2;
    std::size_t vocab_size = 256;
    // Zipf exponent; drawn per step from [0.8, 1.6) when unset.
    std::optional<double> exponent;

    static SyntheticConfig parse(std::string_view options);
};

std::unique_ptr<Backend> make_synthetic_backend(const SyntheticConfig& config,
                                                const Conditioning& conditioning);

// --- replay -----------------------------------------------------------------

/// Pre-recorded distributions, one line per step after a vocabulary header.
/// The context is ignored; query i returns record i.
std::unique_ptr<Backend> make_replay_backend(const std::string& path);

// --- bridge -----------------------------------------------------------------

/// Spawns `command` through /bin/sh and speaks the line-delimited JSON
/// protocol over its stdin/stdout.
std::unique_ptr<Backend> make_bridge_backend(const std::string& command,
                                             const Conditioning& conditioning);

std::string base64_encode(std::string_view bytes);
/// Throws Error{InvalidParams} on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace stegocap
