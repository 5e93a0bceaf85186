#pragma once

#include <stegocap/core.hpp>
#include <stegocap/pooling.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stegocap {

/// Bit sequence, most significant (first transmitted) bit at index 0.
using Bits = std::vector<bool>;

Bits bits_from_string(std::string_view zeros_and_ones);
std::string bits_to_string(const Bits& bits);

/// Each hex digit contributes 4 bits. Throws Error{InvalidHex}.
Bits bits_from_hex(std::string_view hex);
/// Left-pads with zeros to a multiple of 4 bits, lowercase digits.
std::string bits_to_hex(const Bits& bits);

struct BitMessage {
    Bits bits;

    std::size_t length_bits() const noexcept { return bits.size(); }
    friend bool operator==(const BitMessage&, const BitMessage&) = default;
};

inline constexpr std::size_t kHeaderBits = 32;

/// 32-bit big-endian payload length followed by the payload, read through a
/// cursor. Reads past the end yield zeros.
class FramedStream {
public:
    explicit FramedStream(Bits framed) : bits_(std::move(framed)) {}

    std::size_t total_bits() const noexcept { return bits_.size(); }
    std::size_t cursor() const noexcept { return cursor_; }
    bool exhausted() const noexcept { return cursor_ >= bits_.size(); }
    // Bit at cursor + offset, zero beyond the end.
    bool peek(std::size_t offset) const noexcept {
        const std::size_t pos = cursor_ + offset;
        return pos < bits_.size() && bits_[pos];
    }
    void advance(std::size_t n) noexcept { cursor_ += n; }
    const Bits& bits() const noexcept { return bits_; }

private:
    Bits bits_;
    std::size_t cursor_ = 0;
};

/// Throws Error{MessageTooLong} for payloads of 2^32 bits or more.
FramedStream frame(const BitMessage& payload);

/// nullopt while fewer than 32 + L bits have accumulated; surplus is ignored.
std::optional<BitMessage> deframe(const Bits& accumulated);

/// Prefix-free code over a candidate pool. Codewords are canonical: sorted by
/// (length, token id) and numbered consecutively, so the table is a pure
/// function of the code lengths.
class HuffmanCode {
public:
    struct Entry {
        TokenId id;
        Bits codeword;
    };

    std::size_t size() const noexcept { return entries_.size(); }
    // Canonical order, which is also lexicographic order of the codewords.
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const Bits* codeword(TokenId id) const noexcept;
    std::size_t length_of(TokenId id) const;
    double expected_length(const CandidatePool& pool) const;

private:
    friend HuffmanCode build_canonical_huffman(const CandidatePool& pool);
    std::vector<Entry> entries_;
};

/// Huffman lengths with deterministic ties: nodes ordered by (weight, rank),
/// leaf rank = token id, internal rank = min rank of its children.
HuffmanCode build_canonical_huffman(const CandidatePool& pool);

struct EmbedResult {
    TokenId token;
    std::size_t consumed;
};

/// Picks the unique token whose codeword prefixes the remaining stream and
/// advances the cursor past it.
EmbedResult embed_step(const HuffmanCode& code, FramedStream& stream);

/// Throws Error{TokenNotInPool} when the token has no codeword.
const Bits& decode_step(const HuffmanCode& code, TokenId token);

}  // namespace stegocap
