#include <stegocap/models.hpp>

#include <stegocap/error.hpp>
#include <stegocap/simd/kernels.hpp>

#include "toy_corpus.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace stegocap {
namespace {

constexpr std::string_view kEos = "</s>";
constexpr double kLaplaceAlpha = 1.0;

struct TopicCounts {
    // Key: u * (V + 1) + v where BOS is encoded as V.
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> next_counts;
    std::unordered_map<std::uint64_t, std::uint32_t> context_totals;
};

struct ToyCorpus {
    std::vector<std::string> topics;
    std::vector<std::pair<std::string, std::vector<std::string>>> sentences;
    std::shared_ptr<const Vocabulary> vocab;
};

const ToyCorpus& corpus() {
    static const ToyCorpus parsed = [] {
        ToyCorpus c;
        std::set<std::string> words;
        std::istringstream lines{std::string(detail::kToyCorpus)};
        std::string line;
        while (std::getline(lines, line)) {
            const std::size_t tab = line.find('\t');
            if (line.empty() || tab == std::string::npos) {
                continue;
            }
            std::string topic = line.substr(0, tab);
            if (std::find(c.topics.begin(), c.topics.end(), topic) == c.topics.end()) {
                c.topics.push_back(topic);
            }
            std::istringstream ws(line.substr(tab + 1));
            std::vector<std::string> tokens;
            for (std::string w; ws >> w;) {
                words.insert(w);
                tokens.push_back(std::move(w));
            }
            c.sentences.emplace_back(std::move(topic), std::move(tokens));
        }
        std::vector<std::string> tokens(words.begin(), words.end());
        tokens.emplace_back(kEos);
        const auto eos = static_cast<TokenId>(tokens.size() - 1);
        c.vocab = std::make_shared<const Vocabulary>(std::move(tokens), eos);
        return c;
    }();
    return parsed;
}

std::shared_ptr<const TopicCounts> train(const std::string& topic) {
    static std::mutex mutex;
    static std::map<std::string, std::shared_ptr<const TopicCounts>> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(topic); it != cache.end()) {
        return it->second;
    }

    const ToyCorpus& c = corpus();
    const Vocabulary& vocab = *c.vocab;
    const std::uint64_t width = vocab.size() + 1;
    const std::uint64_t bos = vocab.size();
    auto counts = std::make_shared<TopicCounts>();
    for (const auto& [sentence_topic, words] : c.sentences) {
        if (!topic.empty() && sentence_topic != topic) {
            continue;
        }
        std::uint64_t u = bos;
        std::uint64_t v = bos;
        auto observe = [&](TokenId w) {
            const std::uint64_t key = u * width + v;
            auto& row = counts->next_counts[key];
            row.resize(vocab.size(), 0);
            ++row[w];
            ++counts->context_totals[key];
            u = v;
            v = w;
        };
        for (const std::string& w : words) {
            observe(*vocab.find(w));
        }
        observe(*vocab.eos_id());
    }
    cache.emplace(topic, counts);
    return counts;
}

class ToyBackend final : public Backend {
public:
    ToyBackend(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const TopicCounts> counts)
        : vocab_(std::move(vocab)), counts_(std::move(counts)),
          zeros_(vocab_->size(), 0), scratch_(vocab_->size()) {}

    const Vocabulary& vocabulary() const override { return *vocab_; }

    NextTokenDistribution distribution(std::span<const TokenId> context) override {
        const std::uint64_t bos = vocab_->size();
        const std::uint64_t width = bos + 1;
        const std::size_t n = context.size();
        const std::uint64_t u = n >= 2 ? context[n - 2] : bos;
        const std::uint64_t v = n >= 1 ? context[n - 1] : bos;
        const std::uint64_t key = u * width + v;

        const std::vector<std::uint32_t>* row = &zeros_;
        std::uint32_t total = 0;
        if (auto it = counts_->next_counts.find(key); it != counts_->next_counts.end()) {
            row = &it->second;
            total = counts_->context_totals.at(key);
        }
        const double denom = static_cast<double>(total) +
                             kLaplaceAlpha * static_cast<double>(vocab_->size());
        simd::smooth_counts(*row, kLaplaceAlpha, denom, scratch_);

        std::vector<ProbEntry> raw(scratch_.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            raw[i] = {static_cast<TokenId>(i), scratch_[i]};
        }
        return validate_distribution(raw, vocab_->size(), MassMode::Dense);
    }

private:
    std::shared_ptr<const Vocabulary> vocab_;
    std::shared_ptr<const TopicCounts> counts_;
    std::vector<std::uint32_t> zeros_;
    std::vector<double> scratch_;
};

}  // namespace

std::vector<std::string> toy_topics() { return corpus().topics; }

std::unique_ptr<Backend> make_toy_backend(const Conditioning& conditioning) {
    const ToyCorpus& c = corpus();
    const std::string& topic = conditioning.payload;
    if (!topic.empty() && std::find(c.topics.begin(), c.topics.end(), topic) == c.topics.end()) {
        throw Error(ErrorCode::BackendUnavailable, "toy corpus has no topic '" + topic + "'");
    }
    return std::make_unique<ToyBackend>(c.vocab, train(topic));
}

}  // namespace stegocap
