#include <doctest.h>

#include <stegocap/coding.hpp>
#include <stegocap/error.hpp>

#include "oracles.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace stegocap;

namespace {

CandidatePool pool_of(std::vector<ProbEntry> entries) { return CandidatePool::from_entries(entries); }

std::map<TokenId, std::string> table(const HuffmanCode& code) {
    std::map<TokenId, std::string> out;
    for (const auto& e : code.entries()) {
        out[e.id] = bits_to_string(e.codeword);
    }
    return out;
}

FramedStream stream_of(std::string_view bits) { return FramedStream(bits_from_string(bits)); }

CandidatePool random_pool(std::mt19937_64& rng, std::size_t max_size, bool continuous) {
    const std::size_t n = 1 + rng() % max_size;
    std::vector<ProbEntry> entries;
    std::vector<TokenId> ids(64);
    for (TokenId i = 0; i < ids.size(); ++i) {
        ids[i] = i;
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    std::uniform_real_distribution<double> unit(0.001, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double p = unit(rng);
        if (!continuous) {
            p = static_cast<double>(1 + rng() % 20) / 100.0;  // coarse grid, many ties
        }
        entries.push_back({ids[i], p});
    }
    return CandidatePool::from_entries(entries);
}

bool prefix_free(const HuffmanCode& code) {
    const auto& e = code.entries();
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (i == j) {
                continue;
            }
            const Bits& a = e[i].codeword;
            const Bits& b = e[j].codeword;
            if (a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin())) {
                return false;
            }
        }
    }
    return true;
}

// Kraft sum == 1, in exact integer arithmetic.
bool kraft_complete(const HuffmanCode& code) {
    std::size_t max_len = 0;
    for (const auto& e : code.entries()) {
        max_len = std::max(max_len, e.codeword.size());
    }
    REQUIRE(max_len < 63);
    std::uint64_t sum = 0;
    for (const auto& e : code.entries()) {
        sum += std::uint64_t{1} << (max_len - e.codeword.size());
    }
    return sum == (std::uint64_t{1} << max_len);
}

}  // namespace

TEST_CASE("canonical Huffman examples") {
    CHECK(table(build_canonical_huffman(pool_of({{0, 0.5}, {1, 0.25}, {2, 0.25}}))) ==
          std::map<TokenId, std::string>{{0, "0"}, {1, "10"}, {2, "11"}});
    CHECK(table(build_canonical_huffman(pool_of({{0, 0.4}, {1, 0.3}, {2, 0.2}, {3, 0.1}}))) ==
          std::map<TokenId, std::string>{{0, "0"}, {1, "10"}, {2, "110"}, {3, "111"}});
    CHECK(table(build_canonical_huffman(pool_of({{0, 1.0}}))) == std::map<TokenId, std::string>{{0, ""}});
}

TEST_CASE("brute-force oracle agrees with the hand-computed optimum") {
    // Expected lengths 1,2,3,3 -> 0.4 + 0.6 + 0.6 + 0.3 = 1.9
    CHECK(oracle::optimal_prefix_code_length({0.4, 0.3, 0.2, 0.1}) == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(oracle::optimal_prefix_code_length({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0));
    CHECK(oracle::optimal_prefix_code_length({1.0}) == 0.0);
}

TEST_CASE("tie-breaking uses token ids, not input order") {
    // Four equal weights: merges (0,1) then (2,3); all lengths 2.
    const auto code = build_canonical_huffman(pool_of({{3, 0.25}, {1, 0.25}, {0, 0.25}, {2, 0.25}}));
    CHECK(table(code) == std::map<TokenId, std::string>{{0, "00"}, {1, "01"}, {2, "10"}, {3, "11"}});

    // After merging 7+8 into (0.2, rank 7) and 5+6 into (0.4, rank 5), the
    // 0.2 node meets a 0.4 tie: id 1 (rank 1) wins over the rank-5 subtree.
    // The other choice is equally optimal but gives id 1 a 1-bit codeword.
    const auto skew = build_canonical_huffman(
        pool_of({{1, 0.4}, {5, 0.2}, {6, 0.2}, {7, 0.1}, {8, 0.1}}));
    CHECK(table(skew) == std::map<TokenId, std::string>{
                             {1, "00"}, {5, "01"}, {6, "10"}, {7, "110"}, {8, "111"}});
}

TEST_CASE("embed_step examples") {
    const auto code = build_canonical_huffman(pool_of({{0, 0.5}, {1, 0.25}, {2, 0.25}}));
    auto s = stream_of("110");
    const EmbedResult r = embed_step(code, s);
    CHECK(r.token == 2);
    CHECK(r.consumed == 2);
    CHECK(s.cursor() == 2);

    const auto single = build_canonical_huffman(pool_of({{0, 1.0}}));
    auto s2 = stream_of("1011");
    CHECK(embed_step(single, s2).token == 0);
    CHECK(s2.cursor() == 0);

    const auto two = build_canonical_huffman(pool_of({{0, 0.5}, {1, 0.5}}));
    auto done = stream_of("1");
    done.advance(1);
    const EmbedResult padded = embed_step(two, done);
    CHECK(padded.token == 0);
    CHECK(padded.consumed == 1);

    // Mid-codeword exhaustion completes with zero padding.
    auto partial = stream_of("1");
    const EmbedResult tail = embed_step(code, partial);
    CHECK(tail.token == 1);
    CHECK(tail.consumed == 2);
}

TEST_CASE("decode_step examples") {
    const auto code = build_canonical_huffman(pool_of({{0, 0.5}, {1, 0.25}, {2, 0.25}}));
    CHECK(bits_to_string(decode_step(code, 1)) == "10");
    CHECK(decode_step(build_canonical_huffman(pool_of({{0, 1.0}})), 0).empty());
    const auto two = build_canonical_huffman(pool_of({{0, 0.5}, {1, 0.5}}));
    try {
        decode_step(two, 5);
        FAIL("expected TokenNotInPool");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TokenNotInPool);
    }
}

TEST_CASE("framing") {
    const FramedStream s = frame({bits_from_string("10100101")});
    CHECK(bits_to_string(s.bits()) == "00000000000000000000000000001000" "10100101");

    CHECK_FALSE(deframe(Bits(31, false)).has_value());
    const auto complete = deframe(bits_from_string("00000000000000000000000000000011" "101" "0010"));
    REQUIRE(complete.has_value());
    CHECK(bits_to_string(complete->bits) == "101");

    const auto empty = deframe(Bits(32, false));
    REQUIRE(empty.has_value());
    CHECK(empty->bits.empty());

    // Header says 3, only 2 payload bits present.
    CHECK_FALSE(deframe(bits_from_string("00000000000000000000000000000011" "10")).has_value());
}

TEST_CASE("hex helpers") {
    CHECK(bits_to_string(bits_from_hex("a5")) == "10100101");
    CHECK(bits_to_hex(bits_from_hex("DeadBeef")) == "deadbeef");
    CHECK(bits_to_hex(bits_from_string("101")) == "5");
    CHECK(bits_to_hex(bits_from_string("10000")) == "10");
    CHECK(bits_to_hex({}) == "");
    CHECK_THROWS_AS(bits_from_hex("zz"), Error);
}

TEST_CASE("every 16-bit stream decodes uniquely and round-trips (fuzz)") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 24; ++trial) {
        const CandidatePool pool = random_pool(rng, 8, trial % 2 == 0);
        const HuffmanCode code = build_canonical_huffman(pool);
        CAPTURE(trial);
        for (std::uint32_t value = 0; value < (1U << 16); ++value) {
            Bits bits(16);
            for (int i = 0; i < 16; ++i) {
                bits[i] = ((value >> (15 - i)) & 1U) != 0;
            }
            FramedStream s(bits);
            const EmbedResult r = embed_step(code, s);
            const Bits& cw = decode_step(code, r.token);
            // Exactly one codeword prefixes the stream.
            int matches = 0;
            for (const auto& e : code.entries()) {
                matches += std::equal(e.codeword.begin(), e.codeword.end(), bits.begin()) ? 1 : 0;
            }
            if (matches != 1 || r.consumed != cw.size() ||
                !std::equal(cw.begin(), cw.end(), bits.begin())) {
                FAIL_CHECK("stream " << value << " decoded badly");
                break;
            }
        }
    }
}

TEST_CASE("Huffman code properties on random pools (property)") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        const bool continuous = trial % 2 == 0;
        const CandidatePool pool = random_pool(rng, 8, continuous);
        const HuffmanCode code = build_canonical_huffman(pool);
        CAPTURE(trial);
        CHECK(code.size() == pool.size());
        CHECK(prefix_free(code));
        if (pool.size() >= 2) {
            CHECK(kraft_complete(code));
        }
        const std::vector<double> probs(pool.probs().begin(), pool.probs().end());
        CHECK(std::abs(code.expected_length(pool) - oracle::optimal_prefix_code_length(probs)) <= 1e-12);

        // Determinism.
        CHECK(table(build_canonical_huffman(pool)) == table(code));

        // Scale invariance: exact for powers of two on any pool; generic
        // factors on continuous pools (no exact weight ties to flip).
        for (double c : {0.5, 0.125, 4.0}) {
            std::vector<ProbEntry> scaled;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                scaled.push_back({pool.ids()[i], pool.probs()[i] * c});
            }
            CHECK(table(build_canonical_huffman(CandidatePool::from_entries(scaled))) == table(code));
        }
        if (continuous) {
            for (double c : {0.3, 1.7, 123.456}) {
                std::vector<ProbEntry> scaled;
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    scaled.push_back({pool.ids()[i], pool.probs()[i] * c});
                }
                CHECK(table(build_canonical_huffman(CandidatePool::from_entries(scaled))) == table(code));
            }
        }
    }
}

TEST_CASE("codewords are lexicographically increasing in canonical order") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const HuffmanCode code = build_canonical_huffman(random_pool(rng, 40, true));
        const auto& e = code.entries();
        for (std::size_t i = 1; i < e.size(); ++i) {
            CHECK(bits_to_string(e[i - 1].codeword) < bits_to_string(e[i].codeword));
            CHECK(e[i - 1].codeword.size() <= e[i].codeword.size());
        }
    }
}
