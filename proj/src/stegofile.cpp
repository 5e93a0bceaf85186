#include <stegocap/stegofile.hpp>

#include <stegocap/error.hpp>

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>

namespace stegocap {

using nlohmann::json;

std::string to_json(const StegoFile& file) {
    const StegoParams& p = file.params;
    json params = {
        {"t_a", p.pool.t_a},
        {"t_r", p.pool.t_r},
        {"max_len", p.max_len},
        {"eos_policy", p.pool.eos_policy == EosPolicy::Suppress ? "suppress" : "strict"},
        {"max_pool_size", nullptr},
        {"top_k", nullptr},
    };
    if (p.pool.max_pool_size) {
        params["max_pool_size"] = *p.pool.max_pool_size;
    }
    if (p.strategy.kind == PoolStrategy::Kind::TopK) {
        params["top_k"] = p.strategy.k;
    }
    const json doc = {
        {"version", file.version},
        {"backend", file.backend},
        {"conditioning", base64_encode(file.conditioning.payload)},
        {"params", params},
        {"tokens", file.tokens},
        {"token_strings", file.token_strings},
    };
    return doc.dump(2) + "\n";
}

StegoFile stego_file_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        StegoFile file;
        file.version = doc.at("version").get<int>();
        if (file.version != kStegoFileVersion) {
            throw Error(ErrorCode::InvalidStegoFile,
                        "unsupported version " + std::to_string(file.version));
        }
        file.backend = doc.at("backend").get<std::string>();
        file.conditioning.payload = base64_decode(doc.at("conditioning").get<std::string>());

        const json& params = doc.at("params");
        StegoParams& p = file.params;
        p.pool.t_a = params.at("t_a").get<double>();
        p.pool.t_r = params.at("t_r").get<double>();
        p.max_len = params.value("max_len", kDefaultMaxLen);
        const std::string policy = params.value("eos_policy", std::string("suppress"));
        if (policy == "suppress") {
            p.pool.eos_policy = EosPolicy::Suppress;
        } else if (policy == "strict") {
            p.pool.eos_policy = EosPolicy::Strict;
        } else {
            throw Error(ErrorCode::InvalidStegoFile, "eos_policy '" + policy + "'");
        }
        if (params.contains("max_pool_size") && !params["max_pool_size"].is_null()) {
            p.pool.max_pool_size = params["max_pool_size"].get<std::size_t>();
        }
        if (params.contains("top_k") && !params["top_k"].is_null()) {
            p.strategy = PoolStrategy::top_k(params["top_k"].get<std::size_t>());
        }

        if (!doc.at("tokens").is_array()) {
            throw Error(ErrorCode::InvalidStegoFile, "tokens must be an array");
        }
        for (const json& t : doc["tokens"]) {
            if (!t.is_number_unsigned() || t.get<std::uint64_t>() > UINT32_MAX) {
                throw Error(ErrorCode::InvalidStegoFile, "tokens must be non-negative 32-bit integers");
            }
            file.tokens.push_back(t.get<TokenId>());
        }
        if (doc.contains("token_strings")) {
            file.token_strings = doc["token_strings"].get<std::vector<std::string>>();
        }
        return file;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidStegoFile, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidStegoFile) {
            throw;
        }
        throw Error(ErrorCode::InvalidStegoFile, e.what());
    }
}

void write_stego_file(const std::string& path, const StegoFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::InvalidStegoFile, "cannot write '" + path + "'");
    }
    out << to_json(file);
    if (!out) {
        throw Error(ErrorCode::InvalidStegoFile, "write to '" + path + "' failed");
    }
}

StegoFile read_stego_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidStegoFile, "cannot read '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return stego_file_from_json(text.str());
}

}  // namespace stegocap
