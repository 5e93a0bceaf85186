#include <stegocap/metrics.hpp>

#include <stegocap/error.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace stegocap {

Bpw bpw(const StegoOutput& output) {
    if (output.tokens.empty()) {
        throw Error(ErrorCode::EmptyOutput, "no tokens");
    }
    const auto n = static_cast<double>(output.tokens.size());
    return {static_cast<double>(output.gross_bits) / n, static_cast<double>(output.payload_bits) / n};
}

double perplexity_from_probs(std::span<const double> token_probs) {
    if (token_probs.empty()) {
        throw Error(ErrorCode::EmptyOutput, "no tokens to score");
    }
    double log_sum = 0.0;
    for (std::size_t i = 0; i < token_probs.size(); ++i) {
        if (!(token_probs[i] > 0.0)) {
            throw Error(ErrorCode::ZeroProbabilityToken, "token " + std::to_string(i) + " has probability 0");
        }
        log_sum += std::log2(token_probs[i]);
    }
    return std::exp2(-log_sum / static_cast<double>(token_probs.size()));
}

double perplexity(ModelSession& session, std::span<const TokenId> tokens) {
    std::vector<double> probs;
    probs.reserve(tokens.size());
    std::optional<TokenId> last;
    for (const TokenId token : tokens) {
        const double p = session.next_distribution(last).probability_of(token);
        if (!(p > 0.0)) {
            throw Error(ErrorCode::ZeroProbabilityToken,
                        "model gives token " + std::to_string(token) + " at position " +
                            std::to_string(probs.size()) + " probability 0");
        }
        probs.push_back(p);
        last = token;
    }
    return perplexity_from_probs(probs);
}

BitMessage sweep_payload(std::uint64_t seed, std::size_t sample_index, std::size_t bits) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sample_index)};
    std::mt19937_64 rng(seq);
    BitMessage msg;
    msg.bits.reserve(bits);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits; ++i) {
        if (i % 64 == 0) {
            word = rng();
        }
        msg.bits.push_back(((word >> (63 - i % 64)) & 1U) != 0);
    }
    return msg;
}

namespace {

SweepRow run_cell(const SweepConfig& config, double t_a, double t_r) {
    StegoParams params;
    params.pool.t_a = t_a;
    params.pool.t_r = t_r;
    params.pool.eos_policy = config.eos_policy;
    params.max_len = config.max_len;

    SweepRow row{t_a, t_r, config.n_samples, 0.0, 0.0, 0.0, 0};
    for (std::size_t i = 0; i < config.n_samples; ++i) {
        const Conditioning cond =
            config.conditioning ? *config.conditioning : default_conditioning(config.backend_spec, i);
        ModelSession session = open_session(config.backend_spec, cond, config.max_len);
        const HideAttempt attempt =
            try_hide(session, sweep_payload(config.seed, i, config.payload_bits), params);

        const StegoOutput& out = attempt.output;
        const auto n = static_cast<double>(out.tokens.size());
        std::vector<double> probs;
        probs.reserve(out.steps.size());
        for (const StepRecord& step : out.steps) {
            probs.push_back(step.token_prob);
        }
        row.mean_gross_bpw += static_cast<double>(out.gross_bits) / n;
        row.mean_net_bpw += attempt.complete ? static_cast<double>(out.payload_bits) / n : 0.0;
        row.mean_ppl += perplexity_from_probs(probs);
        row.capacity_failures += attempt.complete ? 0 : 1;
    }
    const auto samples = static_cast<double>(config.n_samples);
    row.mean_gross_bpw /= samples;
    row.mean_net_bpw /= samples;
    row.mean_ppl /= samples;
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepConfig& config) {
    if (config.t_a_list.empty() || config.t_r_list.empty()) {
        throw Error(ErrorCode::InvalidParams, "sweep needs at least one t_a and one t_r");
    }
    if (config.n_samples == 0) {
        throw Error(ErrorCode::InvalidParams, "sweep needs n_samples >= 1");
    }

    struct Cell {
        double t_a;
        double t_r;
    };
    std::vector<Cell> cells;
    for (double t_r : config.t_r_list) {
        for (double t_a : config.t_a_list) {
            StegoParams probe;
            probe.pool.t_a = t_a;
            probe.pool.t_r = t_r;
            probe.validate();
            cells.push_back({t_a, t_r});
        }
    }

    std::vector<SweepRow> rows(cells.size());
    std::size_t workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, cells.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            try {
                rows[c] = run_cell(config, cells[c].t_a, cells[c].t_r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = cells.size();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "t_a,t_r,n,mean_gross_bpw,mean_net_bpw,mean_ppl,capacity_failures\n";
    char line[256];
    for (const SweepRow& r : rows) {
        std::snprintf(line, sizeof line, "%.6f,%.6f,%zu,%.6f,%.6f,%.6f,%zu\n", r.t_a, r.t_r,
                      r.n_samples, r.mean_gross_bpw, r.mean_net_bpw, r.mean_ppl, r.capacity_failures);
        out << line;
    }
}

}  // namespace stegocap
