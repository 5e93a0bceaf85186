#include "cli.hpp"

#include <stegocap/error.hpp>
#include <stegocap/metrics.hpp>
#include <stegocap/pipeline.hpp>
#include <stegocap/stegofile.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace stegocap::cli {
namespace {

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::CapacityExceeded:
        return kExitCapacity;
    case ErrorCode::UnknownBackend:
    case ErrorCode::BackendUnavailable:
    case ErrorCode::StepLimitExceeded:
    case ErrorCode::ReplayExhausted:
    case ErrorCode::BridgeProtocolError:
    case ErrorCode::MassOutOfBounds:
        return kExitBackend;
    case ErrorCode::IncompleteMessage:
    case ErrorCode::TokenNotInPool:
    case ErrorCode::ZeroProbabilityToken:
    case ErrorCode::IdOutOfRange:
        return kExitExtraction;
    default:
        return kExitUsage;
    }
}

EosPolicy parse_policy(const std::string& text) {
    if (text == "suppress") {
        return EosPolicy::Suppress;
    }
    if (text == "strict") {
        return EosPolicy::Strict;
    }
    throw Error(ErrorCode::InvalidParams, "eos policy must be 'suppress' or 'strict'");
}

// Synthetic backends take --seed as their seed option.
std::string apply_seed(const std::string& backend, std::optional<std::uint64_t> seed) {
    if (!seed || !backend.starts_with("synthetic")) {
        return backend;
    }
    std::string options = backend.size() > 10 ? backend.substr(10) : std::string();
    std::string rebuilt;
    std::size_t start = 0;
    while (start <= options.size() && !options.empty()) {
        const std::size_t comma = options.find(',', start);
        const std::string item = options.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty() && !item.starts_with("seed=")) {
            rebuilt += (rebuilt.empty() ? "" : ",") + item;
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    rebuilt += (rebuilt.empty() ? "" : ",") + std::string("seed=") + std::to_string(*seed);
    return "synthetic:" + rebuilt;
}

// Relative replay paths are tried against the working directory first, then
// against the directory holding the stego file.
std::string resolve_backend(const std::string& backend, const std::string& stego_path) {
    if (!backend.starts_with("replay:")) {
        return backend;
    }
    const std::filesystem::path replay = backend.substr(7);
    if (replay.is_absolute() || std::filesystem::exists(replay)) {
        return backend;
    }
    const std::filesystem::path beside = std::filesystem::path(stego_path).parent_path() / replay;
    if (std::filesystem::exists(beside)) {
        return "replay:" + beside.string();
    }
    return backend;
}

struct HideOptions {
    std::string backend;
    std::string cond;
    double t_a = 0.0;
    double t_r = 1.0;
    std::string msg_hex;
    std::size_t max_len = kDefaultMaxLen;
    std::optional<std::uint64_t> seed;
    std::string eos_policy = "suppress";
    std::optional<std::size_t> max_pool;
    std::optional<std::size_t> top_k;
    std::string out;
};

int cmd_hide(const HideOptions& o, std::ostream& out) {
    StegoFile file;
    file.backend = apply_seed(o.backend, o.seed);
    file.conditioning.payload = o.cond;
    file.params.pool.t_a = o.t_a;
    file.params.pool.t_r = o.t_r;
    file.params.pool.eos_policy = parse_policy(o.eos_policy);
    file.params.pool.max_pool_size = o.max_pool;
    file.params.max_len = o.max_len;
    if (o.top_k) {
        file.params.strategy = PoolStrategy::top_k(*o.top_k);
    }
    file.params.validate();
    const BitMessage payload{bits_from_hex(o.msg_hex)};

    ModelSession session = open_session(file.backend, file.conditioning, file.params.max_len);
    const StegoOutput result = hide(session, payload, file.params);
    file.tokens = result.tokens;
    std::string text;
    for (TokenId t : result.tokens) {
        file.token_strings.push_back(session.vocabulary().token(t));
        text += (text.empty() ? "" : " ") + file.token_strings.back();
    }
    write_stego_file(o.out, file);

    const Bpw rate = bpw(result);
    char line[160];
    std::snprintf(line, sizeof line, "tokens=%zu gross_bpw=%.6f net_bpw=%.6f\n", result.tokens.size(),
                  rate.gross, rate.net);
    out << line << text << "\n";
    return kExitOk;
}

int cmd_extract(const std::string& in_path, std::ostream& out) {
    const StegoFile file = read_stego_file(in_path);
    ModelSession session = open_session(resolve_backend(file.backend, in_path), file.conditioning,
                                        file.params.max_len);
    const BitMessage payload = extract(session, file.tokens, file.params);
    out << bits_to_hex(payload.bits) << "\n";
    return kExitOk;
}

int cmd_ppl(const std::string& in_path, std::ostream& out) {
    const StegoFile file = read_stego_file(in_path);
    ModelSession session = open_session(resolve_backend(file.backend, in_path), file.conditioning,
                                        file.params.max_len);
    char line[64];
    std::snprintf(line, sizeof line, "%.6f\n", perplexity(session, file.tokens));
    out << line;
    return kExitOk;
}

// "0,0.01,0.1" -> {0, 0.01, 0.1}; empty lists and empty items are rejected.
std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double value = 0.0;
        const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
            throw Error(ErrorCode::InvalidParams, "bad value list '" + text + "'");
        }
        values.push_back(value);
        if (comma == std::string::npos) {
            return values;
        }
        start = comma + 1;
    }
}

struct SweepOptions {
    std::string backend;
    std::vector<double> t_a_list;
    std::vector<double> t_r_list;
    std::size_t n = 1;
    std::size_t payload_bits = 32;
    std::uint64_t seed = 0;
    std::size_t max_len = kDefaultMaxLen;
    std::optional<std::string> cond;
    std::size_t threads = 0;
    std::string out;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
    SweepConfig config;
    config.backend_spec = o.backend;
    config.t_a_list = o.t_a_list;
    config.t_r_list = o.t_r_list;
    config.n_samples = o.n;
    config.payload_bits = o.payload_bits;
    config.seed = o.seed;
    config.max_len = o.max_len;
    config.threads = o.threads;
    if (o.cond) {
        config.conditioning = Conditioning{*o.cond};
    }
    const std::vector<SweepRow> rows = sweep(config);
    std::ofstream csv(o.out);
    if (!csv) {
        throw Error(ErrorCode::InvalidParams, "cannot write '" + o.out + "'");
    }
    write_sweep_csv(csv, rows);
    out << rows.size() << " rows written to " << o.out << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hide bits in generated text and get them back"};
    app.require_subcommand(1);

    HideOptions hide_opts;
    CLI::App* hide_cmd = app.add_subcommand("hide", "embed a hex payload into generated tokens");
    hide_cmd->add_option("--backend", hide_opts.backend, "model backend spec")->required();
    hide_cmd->add_option("--cond", hide_opts.cond, "conditioning (topic, seed material, image path)");
    hide_cmd->add_option("--ta", hide_opts.t_a, "absolute threshold T_A")->required();
    hide_cmd->add_option("--tr", hide_opts.t_r, "relative threshold T_R")->required();
    hide_cmd->add_option("--msg-hex", hide_opts.msg_hex, "payload as hex")->required();
    hide_cmd->add_option("--max-len", hide_opts.max_len, "maximum tokens");
    hide_cmd->add_option("--seed", hide_opts.seed, "seed for synthetic backends");
    hide_cmd->add_option("--eos-policy", hide_opts.eos_policy, "suppress | strict");
    hide_cmd->add_option("--max-pool", hide_opts.max_pool, "cap on candidate pool size");
    hide_cmd->add_option("--topk", hide_opts.top_k, "use a top-k pool instead of thresholds");
    hide_cmd->add_option("--out", hide_opts.out, "stego file to write")->required();

    std::string extract_in;
    CLI::App* extract_cmd = app.add_subcommand("extract", "recover the payload from a stego file");
    extract_cmd->add_option("--in", extract_in, "stego file")->required();

    std::string ppl_in;
    CLI::App* ppl_cmd = app.add_subcommand("ppl", "perplexity of a stego file's tokens");
    ppl_cmd->add_option("--in", ppl_in, "stego file")->required();

    SweepOptions sweep_opts;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "bpw / perplexity over a (T_A, T_R) grid");
    sweep_cmd->add_option("--backend", sweep_opts.backend, "model backend spec")->required();
    std::string t_a_text;
    std::string t_r_text;
    sweep_cmd->add_option("--ta-list", t_a_text, "comma separated T_A values")->required();
    sweep_cmd->add_option("--tr-list", t_r_text, "comma separated T_R values")->required();
    sweep_cmd->add_option("--n", sweep_opts.n, "samples per cell");
    sweep_cmd->add_option("--payload-bits", sweep_opts.payload_bits, "payload length per sample");
    sweep_cmd->add_option("--seed", sweep_opts.seed, "payload seed");
    sweep_cmd->add_option("--max-len", sweep_opts.max_len, "maximum tokens");
    sweep_cmd->add_option("--cond", sweep_opts.cond, "fixed conditioning for every sample");
    sweep_cmd->add_option("--threads", sweep_opts.threads, "worker threads (0 = all cores)");
    sweep_cmd->add_option("--out", sweep_opts.out, "CSV to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*hide_cmd) {
            return cmd_hide(hide_opts, out);
        }
        if (*extract_cmd) {
            return cmd_extract(extract_in, out);
        }
        if (*ppl_cmd) {
            return cmd_ppl(ppl_in, out);
        }
        if (*sweep_cmd) {
            sweep_opts.t_a_list = parse_list(t_a_text);
            sweep_opts.t_r_list = parse_list(t_r_text);
            return cmd_sweep(sweep_opts, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace stegocap::cli
