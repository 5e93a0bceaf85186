#include <stegocap/models.hpp>

#include <stegocap/error.hpp>

#include <json.hpp>

#include <fstream>

namespace stegocap {
namespace {

using nlohmann::json;

class ReplayBackend final : public Backend {
public:
    ReplayBackend(Vocabulary vocab, std::vector<NextTokenDistribution> records)
        : vocab_(std::move(vocab)), records_(std::move(records)) {}

    const Vocabulary& vocabulary() const override { return vocab_; }
    MassMode mass_mode() const override { return MassMode::Sparse; }

    NextTokenDistribution distribution(std::span<const TokenId> context) override {
        const std::size_t step = context.size();
        if (step >= records_.size()) {
            throw Error(ErrorCode::ReplayExhausted, "requested step " + std::to_string(step) +
                                                        " of " + std::to_string(records_.size()));
        }
        return records_[step];
    }

private:
    Vocabulary vocab_;
    std::vector<NextTokenDistribution> records_;
};

std::vector<ProbEntry> parse_entries(const json& entries) {
    std::vector<ProbEntry> raw;
    raw.reserve(entries.size());
    for (const json& pair : entries) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number()) {
            throw Error(ErrorCode::BackendUnavailable, "replay entry must be [token_id, prob]");
        }
        raw.push_back({pair[0].get<TokenId>(), pair[1].get<double>()});
    }
    return raw;
}

}  // namespace

std::unique_ptr<Backend> make_replay_backend(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::BackendUnavailable, "cannot open replay file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::BackendUnavailable, "replay file '" + path + "' is empty");
    }
    try {
        const json header = json::parse(line);
        std::optional<TokenId> eos;
        if (header.contains("eos_id") && !header["eos_id"].is_null()) {
            eos = header["eos_id"].get<TokenId>();
        }
        Vocabulary vocab(header.at("vocab").get<std::vector<std::string>>(), eos);

        std::vector<NextTokenDistribution> records;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            const json record = json::parse(line);
            if (record.at("step").get<std::size_t>() != records.size()) {
                throw Error(ErrorCode::BackendUnavailable,
                            "replay record out of order at step " + std::to_string(records.size()));
            }
            const std::vector<ProbEntry> raw = parse_entries(record.at("entries"));
            records.push_back(validate_distribution(raw, vocab.size(), MassMode::Sparse));
        }
        return std::make_unique<ReplayBackend>(std::move(vocab), std::move(records));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, "replay file '" + path + "': " + e.what());
    }
}

}  // namespace stegocap
