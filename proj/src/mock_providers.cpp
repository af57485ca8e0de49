#include <algorithm>
#include <cmath>

#include "ara/error.hpp"
#include "ara/providers.hpp"
#include "json.hpp"

namespace ara::providers {

using nlohmann::json;

// ------------------------------------------------------------ completions

MockCompletion MockCompletion::answer(std::vector<scoring::TokenProb> score_alternatives,
                                      std::vector<scoring::TokenProb> confidence_alternatives,
                                      std::string explanation) {
    require(!score_alternatives.empty() && !confidence_alternatives.empty(),
            "mock answer needs score and confidence alternatives");
    MockCompletion c;
    auto fixed = [&](std::string t) { c.positions.push_back({std::move(t), {}}); };
    fixed("Answer");
    fixed(":");
    fixed(" ");
    c.positions.push_back({score_alternatives.front().token, std::move(score_alternatives)});
    fixed(" Confidence");
    fixed(":");
    fixed(" ");
    c.positions.push_back({confidence_alternatives.front().token, std::move(confidence_alternatives)});
    fixed(" Explanation");
    fixed(":");
    if (!explanation.empty()) fixed(" " + explanation);
    return c;
}

MockCompletion MockCompletion::text(std::string_view content) {
    MockCompletion c;
    std::size_t start = 0;
    while (start < content.size()) {
        auto next = content.find(' ', start + 1);
        if (next == std::string_view::npos) next = content.size();
        c.positions.push_back({std::string(content.substr(start, next - start)), {}});
        start = next;
    }
    return c;
}

// ------------------------------------------------------------------ chat

MockChatProvider::MockChatProvider(Script script, bool supports_logprobs)
    : script_(std::move(script)), supports_logprobs_(supports_logprobs) {
    require(static_cast<bool>(script_), "mock chat provider needs a script");
}

std::shared_ptr<MockChatProvider> MockChatProvider::by_text(std::vector<std::pair<std::string, MockCompletion>> table,
                                                            bool supports_logprobs) {
    return std::make_shared<MockChatProvider>(
        [table = std::move(table)](const ChatRequest& req) {
            const MockCompletion* best = nullptr;
            std::size_t best_len = 0;
            for (const auto& [key, completion] : table) {
                if (key.size() >= best_len && req.prompt.find(key) != std::string::npos) {
                    best = &completion;
                    best_len = key.size();
                }
            }
            if (best == nullptr) {
                return MockCompletion::text("I cannot rate this text.");
            }
            return *best;
        },
        supports_logprobs);
}

std::string MockChatProvider::complete_payload(const ChatRequest& req) {
    ++calls_;
    const auto completion = script_(req);
    std::string content;
    json positions = json::array();
    for (const auto& p : completion.positions) {
        content += p.token;
        json top = json::array();
        double own_logprob = 0.0;
        if (p.alternatives.empty()) {
            top.push_back({{"token", p.token}, {"logprob", 0.0}});
        } else {
            const auto k = std::min<std::size_t>(p.alternatives.size(), static_cast<std::size_t>(req.top_logprobs_k));
            for (std::size_t i = 0; i < k; ++i) {
                const double lp = std::log(p.alternatives[i].probability);
                top.push_back({{"token", p.alternatives[i].token}, {"logprob", lp}});
                if (p.alternatives[i].token == p.token) own_logprob = lp;
            }
        }
        positions.push_back({{"token", p.token}, {"logprob", own_logprob}, {"top_logprobs", std::move(top)}});
    }
    json choice{{"index", 0},
                {"message", {{"role", "assistant"}, {"content", content}}},
                {"finish_reason", "stop"}};
    if (supports_logprobs_ && req.require_logprobs) {
        choice["logprobs"] = {{"content", std::move(positions)}};
    } else {
        choice["logprobs"] = nullptr;
    }
    return json{{"object", "chat.completion"}, {"model", req.model_id}, {"choices", json::array({choice})}}.dump();
}

// ------------------------------------------------------------- fill-mask

MockFillMaskProvider::MockFillMaskProvider(std::vector<std::string> vocabulary, Script script,
                                           std::map<std::string, std::vector<std::string>> subword_splits)
    : vocabulary_(std::move(vocabulary)), script_(std::move(script)), splits_(std::move(subword_splits)) {
    require(!vocabulary_.empty(), "mock fill-mask provider needs a vocabulary");
}

std::string MockFillMaskProvider::tokenize_payload(const std::string& word) {
    ++calls_;
    std::vector<std::string> pieces;
    if (auto it = splits_.find(word); it != splits_.end()) {
        pieces = it->second;
    } else if (std::find(vocabulary_.begin(), vocabulary_.end(), word) != vocabulary_.end()) {
        pieces = {word};
    }
    return json{{"tokens", pieces}}.dump();
}

std::string MockFillMaskProvider::fill_mask_payload(const FillMaskQuery& q) {
    ++calls_;
    require(q.masked_index < q.tokens.size(), "masked_index outside the query");
    const auto it = std::find(vocabulary_.begin(), vocabulary_.end(), q.target_token);
    if (it == vocabulary_.end()) {
        return json{{"error", "token_not_in_vocabulary"}}.dump();
    }
    const auto t = static_cast<std::size_t>(it - vocabulary_.begin());
    std::vector<double> dist = script_ ? script_(q) : std::vector<double>(vocabulary_.size(), 1.0 / static_cast<double>(vocabulary_.size()));
    require(dist.size() == vocabulary_.size(), "mock script must cover the vocabulary");
    json out{{"target_probability", dist[t]}};
    if (q.full_distribution) {
        out["distribution"] = dist;
        out["target_index"] = t;
    }
    return out.dump();
}

} // namespace ara::providers
