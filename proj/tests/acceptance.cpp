// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "oracles.hpp"

#include <stegocap/coding.hpp>
#include <stegocap/error.hpp>
#include <stegocap/metrics.hpp>
#include <stegocap/pipeline.hpp>
#include <stegocap/pooling.hpp>
#include <stegocap/stegofile.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace stegocap;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

BitMessage random_message(std::mt19937_64& rng, std::size_t bits) {
    BitMessage m;
    for (std::size_t i = 0; i < bits; ++i) {
        m.bits.push_back((rng() & 1) != 0);
    }
    return m;
}

StegoParams semantic_params(double t_a, double t_r, std::size_t max_len = kDefaultMaxLen) {
    StegoParams p;
    p.pool.t_a = t_a;
    p.pool.t_r = t_r;
    p.max_len = max_len;
    return p;
}

Outcome round_trip() {
    const auto start = Clock::now();
    std::mt19937_64 rng(0xacce55);
    const double t_a_values[] = {0.0, 0.001, 0.01, 0.05};
    const double t_r_values[] = {0.1, 0.3, 0.6, 1.0};
    const std::vector<std::string> topics = toy_topics();
    int exact = 0;
    int capacity = 0;
    int corrupt = 0;
    int errors = 0;
    for (int i = 0; i < 1000; ++i) {
        const bool toy = i % 2 == 0;
        std::string spec;
        Conditioning cond;
        if (toy) {
            spec = "toy";
            cond.payload = topics[rng() % topics.size()];
        } else {
            spec = "synthetic:seed=" + std::to_string(rng() % 100000);
            if (rng() % 4 == 0) {
                spec += ",shape=uniform-" + std::to_string(2 + rng() % 30);
            }
            cond.payload = "case-" + std::to_string(i);
        }
        const std::size_t max_len = (rng() % 2 == 0) ? kDefaultMaxLen : 320;
        const StegoParams params = semantic_params(t_a_values[rng() % 4], t_r_values[rng() % 4], max_len);
        const BitMessage message = random_message(rng, rng() % 257);
        try {
            ModelSession tx = open_session(spec, cond, max_len);
            const StegoOutput out = hide(tx, message, params);
            ModelSession rx = open_session(spec, cond, max_len);
            if (extract(rx, out.tokens, params).bits == message.bits) {
                ++exact;
            } else {
                ++corrupt;
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CapacityExceeded) {
                ++capacity;
            } else {
                ++errors;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {corrupt == 0 && errors == 0 && exact > 0 && elapsed < 60.0,
            fmt("%d exact, %d capacity-exceeded, %d corrupted, %d other errors, %.1fs", exact, capacity,
                corrupt, errors, elapsed)};
}

bool prefix_free(const HuffmanCode& code) {
    const auto& e = code.entries();
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (i != j && e[i].codeword.size() <= e[j].codeword.size() &&
                std::equal(e[i].codeword.begin(), e[i].codeword.end(), e[j].codeword.begin())) {
                return false;
            }
        }
    }
    return true;
}

Outcome huffman() {
    std::mt19937_64 rng(0x4aff);
    int optimal = 0;
    int structural = 0;
    int multi = 0;
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t size = 1 + rng() % 8;
        const auto raw = oracle::random_grid_distribution(rng, 64, size);
        const CandidatePool pool = CandidatePool::from_entries(raw);
        const HuffmanCode code = build_canonical_huffman(pool);
        const std::vector<double> probs(pool.probs().begin(), pool.probs().end());
        const double gap = std::abs(code.expected_length(pool) - oracle::optimal_prefix_code_length(probs));
        worst = std::max(worst, gap);
        optimal += gap <= 1e-12;
        if (pool.size() >= 2) {
            ++multi;
            // Kraft sum in units of 2^-8; every codeword is at most 7 bits.
            unsigned kraft = 0;
            for (const auto& e : code.entries()) {
                kraft += 256u >> e.codeword.size();
            }
            structural += prefix_free(code) && kraft == 256;
        }
    }
    return {optimal == 500 && structural == multi,
            fmt("%d/500 optimal (max gap %.3g), %d/%d prefix-free with Kraft sum 1", optimal, worst, structural,
                multi)};
}

std::set<TokenId> members(const CandidatePool& pool) {
    return {pool.ids().begin(), pool.ids().end()};
}

bool subset(const std::set<TokenId>& a, const std::set<TokenId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Outcome pool_rule() {
    std::mt19937_64 rng(0x9001);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t vocab = 40;
    const TokenId eos = vocab - 1;
    int agree = 0;
    int nested = 0;
    int monotone = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto raw = oracle::random_grid_distribution(rng, vocab, 1 + rng() % vocab);
        const NextTokenDistribution dist = validate_distribution(raw, vocab, MassMode::Sparse);
        const bool suppress = rng() % 2 == 0 && !(dist.size() == 1 && dist[0].id == eos);
        PoolParams p;
        p.t_a = unit(rng) * 0.3;
        p.t_r = std::max(1e-6, unit(rng));
        const CandidatePool pool = semantic_pool(dist, p, suppress, eos);
        agree += members(pool) == oracle::pool_members(raw, p.t_a, p.t_r,
                                                        suppress ? std::optional<TokenId>(eos) : std::nullopt);

        PoolParams wider_r = p;
        wider_r.t_r = std::min(1.0, p.t_r + unit(rng) * (1.0 - p.t_r));
        PoolParams higher_a = p;
        higher_a.t_a = std::min(0.999, p.t_a + unit(rng) * 0.3);
        nested += 2;
        monotone += subset(members(pool), members(semantic_pool(dist, wider_r, suppress, eos)));
        monotone += subset(members(semantic_pool(dist, higher_a, suppress, eos)), members(pool));
    }
    return {agree == 10000 && monotone == nested,
            fmt("%d/10000 match the direct rule, %d/%d nested pairs monotone", agree, monotone, nested)};
}

Outcome topk_anchor() {
    std::size_t embed_steps = 0;
    std::size_t embed_bits = 0;
    const std::string specs[] = {"toy", "synthetic:seed=5", "synthetic:seed=6,shape=uniform-7"};
    std::mt19937_64 rng(0x7ab1e);
    for (const std::string& spec : specs) {
        for (int i = 0; i < 20; ++i) {
            StegoParams p;
            p.strategy = PoolStrategy::top_k(2);
            const Conditioning cond = default_conditioning(spec, static_cast<std::size_t>(i));
            ModelSession s = open_session(spec, cond);
            const HideAttempt a = try_hide(s, random_message(rng, 24), p);
            for (const StepRecord& r : a.output.steps) {
                if (r.embedding) {
                    ++embed_steps;
                    embed_bits += r.codeword.size();
                }
            }
        }
    }
    const double rate = static_cast<double>(embed_bits) / static_cast<double>(embed_steps);
    return {embed_steps > 0 && rate == 1.0,
            fmt("gross bpw over %zu embedding steps = %.3f", embed_steps, rate)};
}

Outcome ppl_anchor() {
    ModelSession s = open_session(std::string("replay:") + STEGOCAP_TEST_DATA_DIR + "/halves_replay.jsonl", {});
    const std::vector<TokenId> tokens{0, 1, 1, 0, 1, 0, 0, 1};
    const double halves = perplexity(s, tokens);
    const std::vector<double> mixed{0.5, 0.25};
    const double gap = std::abs(perplexity_from_probs(mixed) - std::pow(2.0, 1.5));
    return {halves == 2.0 && gap <= 1e-9, fmt("halves ppl %.6f, {0.5,0.25} off 2^1.5 by %.3g", halves, gap)};
}

Outcome trends() {
    const auto start = Clock::now();
    SweepConfig c;
    c.backend_spec = "toy";
    c.t_a_list = {0.0, 0.001, 0.005, 0.01, 0.05, 0.1};
    c.t_r_list = {0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0};
    c.n_samples = 200;
    c.payload_bits = 32;
    c.seed = 2022;
    const std::vector<SweepRow> rows = sweep(c);
    const std::size_t na = c.t_a_list.size();
    const std::size_t nr = c.t_r_list.size();
    auto at = [&](std::size_t r, std::size_t a) -> const SweepRow& { return rows[r * na + a]; };

    int bpw_r = 0, ppl_r = 0, pairs_r = 0, bpw_a = 0, pairs_a = 0;
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t r = 0; r + 1 < nr; ++r) {
            ++pairs_r;
            bpw_r += at(r, a).mean_gross_bpw <= at(r + 1, a).mean_gross_bpw;
            ppl_r += at(r, a).mean_ppl <= at(r + 1, a).mean_ppl;
        }
    }
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t a = 0; a + 1 < na; ++a) {
            ++pairs_a;
            bpw_a += at(r, a).mean_gross_bpw >= at(r, a + 1).mean_gross_bpw;
        }
    }
    const double elapsed = seconds_since(start);
    const auto share = [](int k, int n) { return static_cast<double>(k) / n; };
    return {share(bpw_r, pairs_r) >= 0.9 && share(bpw_a, pairs_a) >= 0.9 && share(ppl_r, pairs_r) >= 0.9 &&
                elapsed < 300.0,
            fmt("bpw up in t_r %d/%d, bpw down in t_a %d/%d, ppl up in t_r %d/%d, %.1fs", bpw_r, pairs_r, bpw_a,
                pairs_a, ppl_r, pairs_r, elapsed)};
}

// True when some embedding step would get a different pool under `other`.
// Decoding is a function of the pools alone, so a threshold change that
// leaves every pool intact is not observable by any receiver.
bool changes_a_pool(const std::string& spec, const Conditioning& cond, const StegoOutput& out,
                    const StegoParams& sent, const StegoParams& other) {
    ModelSession s = open_session(spec, cond);
    std::optional<TokenId> last;
    for (const StepRecord& r : out.steps) {
        if (!r.embedding) {
            break;
        }
        const NextTokenDistribution dist = s.next_distribution(last);
        const CandidatePool a = build_pool(dist, sent, true, s.eos_id());
        const CandidatePool b = build_pool(dist, other, true, s.eos_id());
        if (!std::equal(a.ids().begin(), a.ids().end(), b.ids().begin(), b.ids().end())) {
            return true;
        }
        last = r.token;
    }
    return false;
}

Outcome negative_control() {
    std::mt19937_64 rng(0xbad);
    const std::vector<std::string> topics = toy_topics();
    const double t_r_values[] = {0.2, 0.4, 0.6, 1.0};
    int trials = 0;
    int loud = 0;
    int inert = 0;
    for (int i = 0; trials < 200 && i < 2000; ++i) {
        const bool toy = i % 2 == 0;
        const std::string spec = toy ? "toy" : "synthetic:seed=" + std::to_string(rng() % 1000);
        Conditioning cond{toy ? topics[rng() % topics.size()] : "probe-" + std::to_string(i)};
        StegoParams sent = semantic_params(0.0, t_r_values[rng() % 4]);
        const BitMessage message = random_message(rng, 16);
        ModelSession tx = open_session(spec, cond);
        const HideAttempt a = try_hide(tx, message, sent);

        StegoParams used = sent;
        Conditioning used_cond = cond;
        if (i % 4 < 2) {
            used.pool.t_r = sent.pool.t_r >= 0.5 ? sent.pool.t_r - 0.3 : sent.pool.t_r + 0.3;
            used.pool.t_a = (rng() % 2 == 0) ? 0.0 : 0.002;
            if (!changes_a_pool(spec, cond, a.output, sent, used)) {
                ++inert;
                continue;
            }
        } else if (toy) {
            used_cond.payload = topics[(std::find(topics.begin(), topics.end(), cond.payload) - topics.begin() + 1 +
                                        rng() % (topics.size() - 1)) %
                                       topics.size()];
        } else {
            used_cond.payload += "-x";
        }
        ++trials;
        try {
            ModelSession rx = open_session(spec, used_cond);
            loud += extract(rx, a.output.tokens, used).bits != message.bits;
        } catch (const Error&) {
            ++loud;
        }
    }
    return {trials == 200 && loud >= 190,
            fmt("%d/%d mismatched receivers failed or decoded a different payload "
                "(%d threshold changes skipped: every pool identical)",
                loud, trials, inert)};
}

Outcome replay_vectors() {
    const std::string dir = STEGOCAP_TEST_DATA_DIR;
    const StegoFile file = read_stego_file(dir + "/vector_stego.json");
    const std::string spec = "replay:" + dir + "/vector_replay.jsonl";
    ModelSession rx = open_session(spec, file.conditioning, file.params.max_len);
    const std::string hex = bits_to_hex(extract(rx, file.tokens, file.params).bits);

    ModelSession tx = open_session(spec, file.conditioning, file.params.max_len);
    const StegoOutput out = hide(tx, BitMessage{bits_from_hex("c0ffee")}, file.params);
    const bool same_tokens = out.tokens == file.tokens;
    return {hex == "c0ffee" && same_tokens,
            fmt("extract -> %s, hide reproduces %zu tokens: %s", hex.c_str(), file.tokens.size(),
                same_tokens ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"round-trip exactness", round_trip},
        {"huffman correctness", huffman},
        {"pool-rule conformance", pool_rule},
        {"top-k k=2 rate anchor", topk_anchor},
        {"perplexity anchor", ppl_anchor},
        {"toy sweep trends", trends},
        {"negative control", negative_control},
        {"replay vectors", replay_vectors},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
