#include <stegocap/coding.hpp>

#include <stegocap/error.hpp>

#include <algorithm>
#include <queue>

namespace stegocap {

Bits bits_from_string(std::string_view s) {
    Bits out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '0' || c == '1') {
            out.push_back(c == '1');
        } else if (c != ' ') {
            throw Error(ErrorCode::InvalidParams, std::string("not a bit: '") + c + "'");
        }
    }
    return out;
}

std::string bits_to_string(const Bits& bits) {
    std::string out;
    out.reserve(bits.size());
    for (bool b : bits) {
        out.push_back(b ? '1' : '0');
    }
    return out;
}

Bits bits_from_hex(std::string_view hex) {
    Bits out;
    out.reserve(hex.size() * 4);
    for (char c : hex) {
        int v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            throw Error(ErrorCode::InvalidHex, std::string("bad hex digit '") + c + "'");
        }
        for (int shift = 3; shift >= 0; --shift) {
            out.push_back(((v >> shift) & 1) != 0);
        }
    }
    return out;
}

std::string bits_to_hex(const Bits& bits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::size_t pad = (4 - bits.size() % 4) % 4;
    std::string out;
    int acc = 0;
    int filled = static_cast<int>(pad);
    for (bool b : bits) {
        acc = (acc << 1) | (b ? 1 : 0);
        if (++filled == 4) {
            out.push_back(kDigits[acc]);
            acc = 0;
            filled = 0;
        }
    }
    return out;
}

FramedStream frame(const BitMessage& payload) {
    const std::uint64_t length = payload.length_bits();
    if (length >= (std::uint64_t{1} << 32)) {
        throw Error(ErrorCode::MessageTooLong, std::to_string(length) + " payload bits");
    }
    Bits framed;
    framed.reserve(kHeaderBits + payload.bits.size());
    for (int shift = 31; shift >= 0; --shift) {
        framed.push_back(((length >> shift) & 1U) != 0);
    }
    framed.insert(framed.end(), payload.bits.begin(), payload.bits.end());
    return FramedStream(std::move(framed));
}

std::optional<BitMessage> deframe(const Bits& accumulated) {
    if (accumulated.size() < kHeaderBits) {
        return std::nullopt;
    }
    std::uint64_t length = 0;
    for (std::size_t i = 0; i < kHeaderBits; ++i) {
        length = (length << 1) | (accumulated[i] ? 1U : 0U);
    }
    if (accumulated.size() - kHeaderBits < length) {
        return std::nullopt;
    }
    const auto begin = accumulated.begin() + static_cast<std::ptrdiff_t>(kHeaderBits);
    return BitMessage{Bits(begin, begin + static_cast<std::ptrdiff_t>(length))};
}

const Bits* HuffmanCode::codeword(TokenId id) const noexcept {
    for (const Entry& e : entries_) {
        if (e.id == id) {
            return &e.codeword;
        }
    }
    return nullptr;
}

std::size_t HuffmanCode::length_of(TokenId id) const {
    if (const Bits* cw = codeword(id)) {
        return cw->size();
    }
    throw Error(ErrorCode::TokenNotInPool, "token " + std::to_string(id));
}

double HuffmanCode::expected_length(const CandidatePool& pool) const {
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        total += pool.probs()[i] * static_cast<double>(length_of(pool.ids()[i]));
    }
    return total;
}

namespace {

struct MergeNode {
    double weight;
    TokenId rank;
    std::size_t index;
};

struct MergeOrder {
    // std::priority_queue keeps the largest on top; invert for a min-queue.
    bool operator()(const MergeNode& a, const MergeNode& b) const noexcept {
        if (a.weight != b.weight) {
            return a.weight > b.weight;
        }
        return a.rank > b.rank;
    }
};

std::vector<std::size_t> huffman_lengths(const CandidatePool& pool) {
    const std::size_t n = pool.size();
    std::vector<std::size_t> lengths(n, 0);
    if (n < 2) {
        return lengths;
    }
    // Nodes 0..n-1 are leaves; parents of merged nodes are recorded so depths
    // can be read back without building an explicit tree.
    std::vector<std::size_t> parent(2 * n - 1, 0);
    std::priority_queue<MergeNode, std::vector<MergeNode>, MergeOrder> queue;
    for (std::size_t i = 0; i < n; ++i) {
        queue.push({pool.probs()[i], pool.ids()[i], i});
    }
    std::size_t next = n;
    while (queue.size() > 1) {
        const MergeNode first = queue.top();
        queue.pop();
        const MergeNode second = queue.top();
        queue.pop();
        parent[first.index] = next;
        parent[second.index] = next;
        queue.push({first.weight + second.weight, std::min(first.rank, second.rank), next});
        ++next;
    }
    const std::size_t root = next - 1;
    std::vector<std::size_t> depth(2 * n - 1, 0);
    for (std::size_t node = root; node-- > 0;) {
        depth[node] = depth[parent[node]] + 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        lengths[i] = depth[i];
    }
    return lengths;
}

}  // namespace

HuffmanCode build_canonical_huffman(const CandidatePool& pool) {
    const std::vector<std::size_t> lengths = huffman_lengths(pool);

    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (lengths[a] != lengths[b]) {
            return lengths[a] < lengths[b];
        }
        return pool.ids()[a] < pool.ids()[b];
    });

    HuffmanCode code;
    code.entries_.reserve(order.size());
    Bits current;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t len = lengths[order[k]];
        if (k > 0) {
            // Increment as a binary number, then extend with zeros.
            std::size_t pos = current.size();
            while (pos > 0 && current[pos - 1]) {
                current[--pos] = false;
            }
            if (pos > 0) {
                current[pos - 1] = true;
            }
        }
        current.resize(len, false);
        code.entries_.push_back({pool.ids()[order[k]], current});
    }
    return code;
}

EmbedResult embed_step(const HuffmanCode& code, FramedStream& stream) {
    const auto& entries = code.entries();
    if (entries.size() == 1) {
        return {entries.front().id, 0};
    }
    // Canonical codewords are lexicographically increasing and their intervals
    // tile [0, 1), so the match is the last codeword not above the stream.
    const auto not_above_stream = [&](const HuffmanCode::Entry& e) {
        for (std::size_t i = 0; i < e.codeword.size(); ++i) {
            const bool s = stream.peek(i);
            if (e.codeword[i] != s) {
                return s;
            }
        }
        return true;
    };
    const auto it = std::partition_point(entries.begin(), entries.end(), not_above_stream);
    const HuffmanCode::Entry& match = *(it - 1);
    stream.advance(match.codeword.size());
    return {match.id, match.codeword.size()};
}

const Bits& decode_step(const HuffmanCode& code, TokenId token) {
    if (const Bits* cw = code.codeword(token)) {
        return *cw;
    }
    throw Error(ErrorCode::TokenNotInPool, "token " + std::to_string(token) + " not in candidate pool");
}

}  // namespace stegocap
