#include "ara/providers.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "ara/error.hpp"
#include "log.hpp"

namespace ara::providers {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

[[noreturn]] void malformed(std::string_view what, const std::exception& e) {
    raise(ErrorCode::TransportError, std::string("malformed ") + std::string(what) + " payload: " + e.what());
}

json parse_json(std::string_view payload, std::string_view what) {
    try {
        return json::parse(payload);
    } catch (const json::exception& e) {
        malformed(what, e);
    }
}

bool contains_ci(std::string haystack, std::string needle) {
    for (auto* s : {&haystack, &needle}) {
        for (auto& ch : *s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return haystack.find(needle) != std::string::npos;
}

bool is_transient(int status) { return status == 408 || status == 429 || status >= 500; }

/// POST with bounded exponential backoff on transient failures. Non-transient
/// HTTP errors are mapped to error codes; a 2xx body is returned untouched.
std::string post_with_retry(HttpTransport& transport, const RetryPolicy& retry, const std::string& path,
                            const std::string& body, const std::string& api_key) {
    std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
    if (!api_key.empty()) headers["Authorization"] = "Bearer " + api_key;

    auto delay = retry.initial_backoff;
    std::string last_failure;
    const int attempts = std::max(1, retry.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        std::optional<HttpResponse> res;
        try {
            res = transport.post(path, body, headers);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TransportError) throw;
            last_failure = e.what();
        }
        if (res) {
            if (res->status >= 200 && res->status < 300) return res->body;
            if (res->status == 401 || res->status == 403) {
                raise(ErrorCode::AuthError, "endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
            }
            if (!is_transient(res->status)) {
                if (contains_ci(res->body, "context length") || contains_ci(res->body, "context_length") ||
                    contains_ci(res->body, "maximum context")) {
                    raise(ErrorCode::ContextLengthExceeded, res->body.substr(0, 500));
                }
                if (contains_ci(res->body, "logprobs")) {
                    raise(ErrorCode::LogprobsUnsupported, res->body.substr(0, 500));
                }
                raise(ErrorCode::TransportError,
                      "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
            }
            last_failure = "HTTP " + std::to_string(res->status);
        }
        if (attempt < attempts) {
            detail::logger().warn("transient failure on {} ({}), retry {}/{} in {} ms", path, last_failure, attempt,
                                  attempts - 1, delay.count());
            if (retry.sleep) {
                retry.sleep(delay);
            } else {
                std::this_thread::sleep_for(delay);
            }
            delay = std::chrono::milliseconds(
                static_cast<long long>(static_cast<double>(delay.count()) * retry.multiplier));
        }
    }
    raise(ErrorCode::TransportError, "giving up after " + std::to_string(attempts) + " attempts: " + last_failure);
}

} // namespace

// ---------------------------------------------------------------- chat

std::string chat_request_body(const ChatRequest& req) {
    json body{
        {"model", req.model_id},
        {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
        {"temperature", req.temperature},
        {"max_tokens", req.max_output_tokens},
        {"logprobs", req.require_logprobs},
    };
    if (req.require_logprobs) body["top_logprobs"] = req.top_logprobs_k;
    return body.dump();
}

ChatResponse parse_chat_completion(std::string_view payload, const ChatRequest& req) {
    const json doc = parse_json(payload, "chat completion");
    ChatResponse out;
    out.raw_payload = std::string(payload);
    try {
        const auto& choice = doc.at("choices").at(0);
        out.text = choice.at("message").at("content").get<std::string>();
        out.model_id = doc.value("model", req.model_id);

        const json* content = nullptr;
        if (auto lp = choice.find("logprobs"); lp != choice.end() && lp->is_object()) {
            if (auto c = lp->find("content"); c != lp->end() && c->is_array()) content = &*c;
        }
        if (content == nullptr) {
            if (req.require_logprobs) {
                raise(ErrorCode::LogprobsUnsupported, "response carries no per-token logprobs");
            }
            return out;
        }
        for (std::size_t pos = 0; pos < content->size(); ++pos) {
            const auto& entry = (*content)[pos];
            out.tokens.push_back(entry.at("token").get<std::string>());
            std::vector<std::pair<std::string, double>> alternatives;
            if (auto top = entry.find("top_logprobs"); top != entry.end() && top->is_array() && !top->empty()) {
                for (const auto& alt : *top) {
                    alternatives.emplace_back(alt.at("token").get<std::string>(), alt.at("logprob").get<double>());
                }
            } else {
                alternatives.emplace_back(out.tokens.back(), entry.at("logprob").get<double>());
            }
            auto dist = scoring::TokenDistribution::from_logprobs(alternatives, pos);
            if (req.top_logprobs_k > 0 && dist.size() > static_cast<std::size_t>(req.top_logprobs_k)) {
                auto kept = dist.entries();
                kept.resize(static_cast<std::size_t>(req.top_logprobs_k));
                dist = scoring::TokenDistribution(std::move(kept), pos);
            }
            out.token_logprobs.push_back(std::move(dist));
        }
        if (req.require_logprobs && out.token_logprobs.empty()) {
            raise(ErrorCode::LogprobsUnsupported, "response carries an empty logprobs list");
        }
    } catch (const json::exception& e) {
        malformed("chat completion", e);
    }
    return out;
}

ChatResponse ChatProvider::complete(const ChatRequest& req) {
    require(req.temperature == 0.0, "scoring runs use temperature 0");
    require(req.top_logprobs_k > 0 && req.max_output_tokens > 0, "top_logprobs_k and max_output_tokens must be positive");
    const auto start = std::chrono::steady_clock::now();
    const auto payload = complete_payload(req);
    auto response = parse_chat_completion(payload, req);
    response.latency = std::chrono::steady_clock::now() - start;
    return response;
}

// ----------------------------------------------------------- fill-mask

std::string fill_mask_request_body(const FillMaskQuery& q) {
    return json{{"tokens", q.tokens},
                {"masked_index", q.masked_index},
                {"target_token", q.target_token},
                {"full_distribution", q.full_distribution}}
        .dump();
}

std::string tokenize_request_body(std::string_view word) { return json{{"text", word}}.dump(); }

FillMaskResult parse_fill_mask_response(std::string_view payload, const FillMaskQuery& q) {
    const json doc = parse_json(payload, "fill-mask");
    FillMaskResult out;
    out.raw_payload = std::string(payload);
    try {
        if (auto err = doc.find("error"); err != doc.end()) {
            if (err->get<std::string>() == "token_not_in_vocabulary") {
                raise(ErrorCode::TokenNotInVocabulary, "'" + q.target_token + "' is not a single vocabulary entry");
            }
            raise(ErrorCode::TransportError, "fill-mask endpoint error: " + err->get<std::string>());
        }
        out.target_probability = doc.at("target_probability").get<double>();
        if (!(out.target_probability >= 0.0 && out.target_probability <= 1.0)) {
            raise(ErrorCode::TransportError, "target_probability outside [0, 1]");
        }
        if (auto d = doc.find("distribution"); d != doc.end() && !d->is_null()) {
            auto dist = d->get<std::vector<double>>();
            const std::size_t t = doc.at("target_index").get<std::size_t>();
            if (t >= dist.size()) raise(ErrorCode::TransportError, "target_index outside the distribution");
            const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
            if (std::abs(total - 1.0) > 1e-4) {
                raise(ErrorCode::TransportError, "distribution sums to " + std::to_string(total));
            }
            if (std::abs(dist[t] - out.target_probability) > 1e-12) {
                raise(ErrorCode::TransportError, "distribution disagrees with target_probability");
            }
            out.full_distribution = std::move(dist);
            out.target_index = t;
        } else if (q.full_distribution) {
            raise(ErrorCode::TransportError, "full distribution requested but not returned");
        }
    } catch (const json::exception& e) {
        malformed("fill-mask", e);
    }
    return out;
}

SubwordSplit parse_tokenize_response(std::string_view payload, std::string_view word) {
    const json doc = parse_json(payload, "tokenize");
    SubwordSplit out;
    out.raw_payload = std::string(payload);
    try {
        out.pieces = doc.at("tokens").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        malformed("tokenize", e);
    }
    if (out.pieces.empty()) {
        raise(ErrorCode::TokenNotInVocabulary, "'" + std::string(word) + "' has no mask-slot representation");
    }
    return out;
}

FillMaskResult FillMaskProvider::fill_mask(const FillMaskQuery& q) {
    require(q.masked_index < q.tokens.size(), "masked_index " + std::to_string(q.masked_index) +
                                                  " outside a query of " + std::to_string(q.tokens.size()) +
                                                  " tokens");
    return parse_fill_mask_response(fill_mask_payload(q), q);
}

SubwordSplit FillMaskProvider::split_word(const std::string& word) {
    return parse_tokenize_response(tokenize_payload(word), word);
}

// ------------------------------------------------------------ endpoints

EndpointConfig EndpointConfig::chat_from_env() {
    EndpointConfig c;
    c.base_url = env_or("ARA_ENDPOINT");
    c.api_key = env_or("ARA_API_KEY");
    return c;
}

EndpointConfig EndpointConfig::fill_mask_from_env() {
    EndpointConfig c;
    c.base_url = env_or("ARA_FILL_MASK_ENDPOINT");
    c.api_key = env_or("ARA_API_KEY");
    return c;
}

std::size_t estimate_prompt_tokens(std::string_view prompt) noexcept { return (prompt.size() + 3) / 4; }

HttpChatProvider::HttpChatProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport, RetryPolicy retry)
    : config_(std::move(config)), transport_(std::move(transport)), retry_(std::move(retry)) {
    require(transport_ != nullptr, "chat provider needs a transport");
}

std::string HttpChatProvider::complete_payload(const ChatRequest& req) {
    if (config_.context_limit_tokens) {
        const auto needed = estimate_prompt_tokens(req.prompt) + static_cast<std::size_t>(req.max_output_tokens);
        if (needed > *config_.context_limit_tokens) {
            raise(ErrorCode::ContextLengthExceeded, "estimated " + std::to_string(needed) + " tokens exceed the limit of " +
                                                        std::to_string(*config_.context_limit_tokens));
        }
    }
    return post_with_retry(*transport_, retry_, config_.chat_path, chat_request_body(req), config_.api_key);
}

HttpFillMaskProvider::HttpFillMaskProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport,
                                           RetryPolicy retry)
    : config_(std::move(config)), transport_(std::move(transport)), retry_(std::move(retry)) {
    require(transport_ != nullptr, "fill-mask provider needs a transport");
}

std::string HttpFillMaskProvider::fill_mask_payload(const FillMaskQuery& q) {
    return post_with_retry(*transport_, retry_, config_.fill_mask_path, fill_mask_request_body(q), config_.api_key);
}

std::string HttpFillMaskProvider::tokenize_payload(const std::string& word) {
    return post_with_retry(*transport_, retry_, config_.tokenize_path, tokenize_request_body(word), config_.api_key);
}

} // namespace ara::providers
