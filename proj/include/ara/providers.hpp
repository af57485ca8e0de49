#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ara/scoring.hpp"

namespace ara::providers {

// ---------------------------------------------------------------- chat

struct ChatRequest {
    std::string model_id;
    std::string prompt;
    double temperature = 0.0;
    int top_logprobs_k = 10;
    int max_output_tokens = 256;
    bool require_logprobs = true;
    /// Re-ask counter. Not sent on the wire; it only enters the cache key so
    /// that a re-ask after a parse failure is a distinct record.
    int attempt = 0;
};

struct ChatResponse {
    std::string text;
    std::vector<std::string> tokens; ///< sampled token per position
    std::vector<scoring::TokenDistribution> token_logprobs;
    std::string model_id;
    std::chrono::nanoseconds latency{0};
    std::string raw_payload;
};

/// JSON body POSTed to a chat-completions endpoint. Key order is fixed, so
/// the same request always serializes to the same bytes.
std::string chat_request_body(const ChatRequest& req);

/// Parses a chat-completions response payload. Throws LogprobsUnsupported
/// when logprobs were required but are absent, TransportError when the
/// payload is not a chat completion.
ChatResponse parse_chat_completion(std::string_view payload, const ChatRequest& req);

class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    /// Stable identifier that enters cache keys (not the endpoint URL).
    virtual std::string id() const = 0;

    /// The raw response payload for `req`.
    virtual std::string complete_payload(const ChatRequest& req) = 0;

    ChatResponse complete(const ChatRequest& req);
};

// ----------------------------------------------------------- fill-mask

struct FillMaskQuery {
    std::vector<std::string> tokens;
    std::size_t masked_index = 0;
    std::string target_token;
    bool full_distribution = false;
};

struct FillMaskResult {
    double target_probability = 0.0;
    std::optional<std::vector<double>> full_distribution;
    std::optional<std::size_t> target_index; ///< index of the target in full_distribution
    std::string raw_payload;
};

struct SubwordSplit {
    std::vector<std::string> pieces;
    std::string raw_payload;
};

std::string fill_mask_request_body(const FillMaskQuery& q);
std::string tokenize_request_body(std::string_view word);

/// Validates the result invariants; a full distribution must sum to 1 within
/// 1e-4 and hold target_probability at target_index.
FillMaskResult parse_fill_mask_response(std::string_view payload, const FillMaskQuery& q);

/// An empty piece list means the word cannot be placed in mask slots and
/// raises TokenNotInVocabulary.
SubwordSplit parse_tokenize_response(std::string_view payload, std::string_view word);

class FillMaskProvider {
public:
    virtual ~FillMaskProvider() = default;
    virtual std::string id() const = 0;
    virtual std::string fill_mask_payload(const FillMaskQuery& q) = 0;
    virtual std::string tokenize_payload(const std::string& word) = 0;

    /// Checks 0 <= masked_index < tokens.size() before any call.
    FillMaskResult fill_mask(const FillMaskQuery& q);
    SubwordSplit split_word(const std::string& word);
};

// ------------------------------------------------------------ transport

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// Throws TransportError when no HTTP response was received.
    virtual HttpResponse post(const std::string& path, const std::string& body,
                              const std::map<std::string, std::string>& headers) = 0;
};

/// Real HTTP(S) transport. Every attempt increments live_network_calls().
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::seconds timeout = std::chrono::seconds(120));

/// Number of real network requests attempted by this process.
std::uint64_t live_network_calls() noexcept;

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    std::function<void(std::chrono::milliseconds)> sleep; ///< defaults to this_thread::sleep_for
};

struct EndpointConfig {
    std::string base_url;
    std::string api_key;
    std::string chat_path = "/v1/chat/completions";
    std::string fill_mask_path = "/fill-mask";
    std::string tokenize_path = "/tokenize";
    /// When set, prompts whose estimated size (bytes / 4 plus the output
    /// budget) exceeds it fail before any request is made.
    std::optional<std::size_t> context_limit_tokens;

    /// ARA_ENDPOINT and ARA_API_KEY.
    static EndpointConfig chat_from_env();
    /// ARA_FILL_MASK_ENDPOINT and ARA_API_KEY.
    static EndpointConfig fill_mask_from_env();
};

std::size_t estimate_prompt_tokens(std::string_view prompt) noexcept;

/// OpenAI-compatible chat completions over an HttpTransport.
class HttpChatProvider : public ChatProvider {
public:
    HttpChatProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport, RetryPolicy retry = {});
    std::string id() const override { return "openai-chat"; }
    std::string complete_payload(const ChatRequest& req) override;

private:
    EndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    RetryPolicy retry_;
};

class HttpFillMaskProvider : public FillMaskProvider {
public:
    HttpFillMaskProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport, RetryPolicy retry = {});
    std::string id() const override { return "http-fill-mask"; }
    std::string fill_mask_payload(const FillMaskQuery& q) override;
    std::string tokenize_payload(const std::string& word) override;

private:
    EndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    RetryPolicy retry_;
};

// ---------------------------------------------------------------- mocks

struct MockPosition {
    std::string token;
    std::vector<scoring::TokenProb> alternatives; ///< ranked; empty means {token, 1.0}
};

struct MockCompletion {
    std::vector<MockPosition> positions;

    /// "Answer: <s> Confidence: <c> Explanation: <explanation>" where the
    /// score and confidence positions carry the given alternatives and every
    /// other position is certain. The sampled token is the top alternative.
    static MockCompletion answer(std::vector<scoring::TokenProb> score_alternatives,
                                 std::vector<scoring::TokenProb> confidence_alternatives,
                                 std::string explanation = "Mock explanation.");
    /// Free text split on spaces, every position certain.
    static MockCompletion text(std::string_view content);
};

class MockChatProvider : public ChatProvider {
public:
    using Script = std::function<MockCompletion(const ChatRequest&)>;

    explicit MockChatProvider(Script script, bool supports_logprobs = true);

    /// Picks the completion whose key is the longest substring of the prompt.
    static std::shared_ptr<MockChatProvider> by_text(std::vector<std::pair<std::string, MockCompletion>> table,
                                                     bool supports_logprobs = true);

    std::string id() const override { return "mock-chat"; }
    std::string complete_payload(const ChatRequest& req) override;
    std::size_t calls() const noexcept { return calls_.load(); }

private:
    Script script_;
    bool supports_logprobs_;
    std::atomic<std::size_t> calls_{0};
};

class MockFillMaskProvider : public FillMaskProvider {
public:
    /// Distribution over the vocabulary for a query; the default is uniform.
    using Script = std::function<std::vector<double>(const FillMaskQuery&)>;

    MockFillMaskProvider(std::vector<std::string> vocabulary, Script script = {},
                         std::map<std::string, std::vector<std::string>> subword_splits = {});

    std::string id() const override { return "mock-fill-mask"; }
    std::string fill_mask_payload(const FillMaskQuery& q) override;
    std::string tokenize_payload(const std::string& word) override;

    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
    std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::vector<std::string> vocabulary_;
    Script script_;
    std::map<std::string, std::vector<std::string>> splits_;
    std::atomic<std::size_t> calls_{0};
};

} // namespace ara::providers
