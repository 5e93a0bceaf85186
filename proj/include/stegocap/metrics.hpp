#pragma once

#include <stegocap/pipeline.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stegocap {

struct Bpw {
    double gross = 0.0;  // framed bits (header + payload + padding) per token
    double net = 0.0;    // payload bits per token
};

/// Throws Error{EmptyOutput} when no tokens were generated.
Bpw bpw(const StegoOutput& output);

/// 2^(-mean log2 p) over per-token model probabilities. Throws
/// Error{ZeroProbabilityToken} on a zero and Error{EmptyOutput} on no input.
double perplexity_from_probs(std::span<const double> token_probs);

/// Scores `tokens` with a fresh session against the raw (pre-pool) quantized
/// distributions.
double perplexity(ModelSession& session, std::span<const TokenId> tokens);

struct SweepConfig {
    std::string backend_spec;
    std::vector<double> t_a_list;
    std::vector<double> t_r_list;
    std::size_t n_samples = 1;
    std::size_t payload_bits = 32;
    std::uint64_t seed = 0;
    std::size_t max_len = kDefaultMaxLen;
    EosPolicy eos_policy = EosPolicy::Suppress;
    // Used for every sample when set; otherwise default_conditioning(spec, i).
    std::optional<Conditioning> conditioning;
    // 0 = hardware concurrency.
    std::size_t threads = 0;
};

struct SweepRow {
    double t_a = 0.0;
    double t_r = 0.0;
    std::size_t n_samples = 0;
    double mean_gross_bpw = 0.0;
    double mean_net_bpw = 0.0;
    double mean_ppl = 0.0;
    std::size_t capacity_failures = 0;
};

/// Payload for sample i; shared by every grid cell so cells are compared on
/// the same messages.
BitMessage sweep_payload(std::uint64_t seed, std::size_t sample_index, std::size_t bits);

/// Runs n_samples hides per (t_a, t_r) cell. Rows are ordered t_r-major.
/// A sample that runs out of room contributes its partial text: the framed
/// bits it did carry, zero payload bits, and the perplexity of what it wrote.
std::vector<SweepRow> sweep(const SweepConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace stegocap
