#include <gtest/gtest.h>

#include <unistd.h>

#include <deque>
#include <fstream>
#include <thread>

#include "ara/cache.hpp"
#include "ara/error.hpp"
#include "ara/providers.hpp"
#include "json.hpp"

using namespace ara;
using namespace ara::providers;
using nlohmann::json;

namespace {

/// Serves scripted responses; an entry with status 0 simulates no response.
class FakeTransport : public HttpTransport {
public:
    explicit FakeTransport(std::deque<HttpResponse> script) : script_(std::move(script)) {}

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override {
        paths.push_back(path);
        bodies.push_back(body);
        last_headers = headers;
        if (script_.empty()) raise(ErrorCode::TransportError, "script exhausted");
        auto r = script_.front();
        script_.pop_front();
        if (r.status == 0) raise(ErrorCode::TransportError, "connection refused");
        return r;
    }

    std::vector<std::string> paths;
    std::vector<std::string> bodies;
    std::map<std::string, std::string> last_headers;

private:
    std::deque<HttpResponse> script_;
};

std::string completion_payload(bool with_logprobs) {
    json choice{{"index", 0}, {"message", {{"role", "assistant"}, {"content", "Answer: 3 Confidence: 8"}}}};
    if (with_logprobs) {
        json content = json::array();
        for (auto tok : {"Answer", ":", " ", "3"}) {
            content.push_back({{"token", tok},
                               {"logprob", 0.0},
                               {"top_logprobs", json::array({{{"token", tok}, {"logprob", 0.0}}})}});
        }
        choice["logprobs"] = {{"content", content}};
    }
    return json{{"choices", json::array({choice})}}.dump();
}

RetryPolicy recording_policy(std::vector<long long>& sleeps) {
    RetryPolicy p;
    p.sleep = [&sleeps](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };
    return p;
}

ChatRequest request(std::string prompt = "Rate this.") {
    ChatRequest r;
    r.model_id = "m";
    r.prompt = std::move(prompt);
    return r;
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ara_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

MockCompletion three_of_six() {
    return MockCompletion::answer({{"3", 0.6}, {"4", 0.3}, {"Answer", 0.1}}, {{"8", 1.0}});
}

} // namespace

TEST(ChatBody, IsDeterministicAndOmitsTopLogprobsWithoutLogprobs) {
    auto r = request();
    EXPECT_EQ(chat_request_body(r), chat_request_body(r));
    auto j = json::parse(chat_request_body(r));
    EXPECT_EQ(j["temperature"], 0.0);
    EXPECT_EQ(j["top_logprobs"], 10);
    EXPECT_EQ(j["messages"][0]["role"], "user");
    r.require_logprobs = false;
    j = json::parse(chat_request_body(r));
    EXPECT_FALSE(j.contains("top_logprobs"));
    EXPECT_EQ(j["logprobs"], false);
}

TEST(ChatParse, ReadsTokensAndAlternatives) {
    const auto resp = parse_chat_completion(completion_payload(true), request());
    EXPECT_EQ(resp.text, "Answer: 3 Confidence: 8");
    ASSERT_EQ(resp.tokens.size(), 4u);
    EXPECT_EQ(resp.tokens[3], "3");
    EXPECT_DOUBLE_EQ(resp.token_logprobs[3].entries()[0].probability, 1.0);
}

TEST(ChatParse, MissingLogprobsIsLogprobsUnsupportedOnlyWhenRequired) {
    auto r = request();
    try {
        parse_chat_completion(completion_payload(false), r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LogprobsUnsupported);
    }
    r.require_logprobs = false;
    EXPECT_EQ(parse_chat_completion(completion_payload(false), r).text, "Answer: 3 Confidence: 8");
}

TEST(ChatParse, GarbageIsTransportError) {
    try {
        parse_chat_completion("not json", request());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TransportError);
    }
}

TEST(MockChat, IsByteIdenticalAcrossCalls) {
    auto mock = MockChatProvider::by_text({{"Rate", three_of_six()}});
    const auto a = mock->complete(request());
    const auto b = mock->complete(request());
    EXPECT_EQ(a.raw_payload, b.raw_payload);
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.tokens, b.tokens);
    EXPECT_EQ(a.token_logprobs, b.token_logprobs);
    EXPECT_EQ(mock->calls(), 2u);
}

TEST(MockChat, WithoutLogprobSupportRaisesInExpectedValueMode) {
    auto mock = MockChatProvider::by_text({{"Rate", three_of_six()}}, false);
    try {
        mock->complete(request());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LogprobsUnsupported);
    }
    auto r = request();
    r.require_logprobs = false;
    EXPECT_FALSE(mock->complete(r).text.empty());
}

TEST(MockChat, RejectsNonZeroTemperature) {
    auto mock = MockChatProvider::by_text({});
    auto r = request();
    r.temperature = 0.7;
    EXPECT_THROW(mock->complete(r), Error);
}

TEST(HttpChat, RetriesTransientFailuresWithExponentialBackoff) {
    auto t = std::make_shared<FakeTransport>(
        std::deque<HttpResponse>{{0, ""}, {503, "busy"}, {429, "slow down"}, {200, completion_payload(true)}});
    std::vector<long long> sleeps;
    HttpChatProvider p({.base_url = "http://x", .api_key = "k"}, t, recording_policy(sleeps));
    EXPECT_EQ(p.complete(request()).tokens.size(), 4u);
    EXPECT_EQ(t->paths.size(), 4u);
    EXPECT_EQ(sleeps, (std::vector<long long>{500, 1000, 2000}));
    EXPECT_EQ(t->last_headers.at("Authorization"), "Bearer k");
}

TEST(HttpChat, GivesUpAfterFourAttempts) {
    auto t = std::make_shared<FakeTransport>(
        std::deque<HttpResponse>{{500, ""}, {500, ""}, {500, ""}, {500, ""}, {200, completion_payload(true)}});
    std::vector<long long> sleeps;
    HttpChatProvider p({.base_url = "http://x"}, t, recording_policy(sleeps));
    try {
        p.complete(request());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TransportError);
    }
    EXPECT_EQ(t->paths.size(), 4u);
}

TEST(HttpChat, AuthFailureIsNotRetried) {
    auto t = std::make_shared<FakeTransport>(std::deque<HttpResponse>{{401, "bad key"}});
    std::vector<long long> sleeps;
    HttpChatProvider p({.base_url = "http://x"}, t, recording_policy(sleeps));
    try {
        p.complete(request());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AuthError);
    }
    EXPECT_EQ(t->paths.size(), 1u);
    EXPECT_TRUE(sleeps.empty());
}

TEST(HttpChat, MapsClientErrorBodies) {
    auto t = std::make_shared<FakeTransport>(std::deque<HttpResponse>{
        {400, R"({"error":"maximum context length is 4096 tokens"})"},
        {400, R"({"error":"logprobs are not supported for this model"})"},
        {404, "no such route"}});
    std::vector<long long> sleeps;
    HttpChatProvider p({.base_url = "http://x"}, t, recording_policy(sleeps));
    for (auto expected : {ErrorCode::ContextLengthExceeded, ErrorCode::LogprobsUnsupported, ErrorCode::TransportError}) {
        try {
            p.complete(request());
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), expected);
        }
    }
}

TEST(HttpChat, ContextLimitFailsBeforeAnyRequest) {
    auto t = std::make_shared<FakeTransport>(std::deque<HttpResponse>{});
    EndpointConfig cfg{.base_url = "http://x"};
    cfg.context_limit_tokens = 100;
    HttpChatProvider p(cfg, t);
    try {
        p.complete(request(std::string(400, 'x')));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ContextLengthExceeded);
    }
    EXPECT_TRUE(t->paths.empty());
}

TEST(FillMask, UniformToyVocabularyGivesOneFifth) {
    MockFillMaskProvider mock({"a", "b", "c", "d", "e"});
    const auto r = mock.fill_mask({{"a", "b"}, 1, "b", false});
    EXPECT_DOUBLE_EQ(r.target_probability, 0.2);
}

TEST(FillMask, ScriptedMassOnTarget) {
    MockFillMaskProvider mock({"a", "b"}, [](const FillMaskQuery&) { return std::vector<double>{0.9, 0.1}; });
    const auto r = mock.fill_mask({{"a"}, 0, "a", true});
    EXPECT_DOUBLE_EQ(r.target_probability, 0.9);
    ASSERT_TRUE(r.full_distribution);
    EXPECT_EQ(r.target_index, 0u);
}

TEST(FillMask, OutOfRangeMaskIsPreconditionViolation) {
    MockFillMaskProvider mock({"a"});
    try {
        mock.fill_mask({{"a"}, 1, "a", false});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionViolation);
    }
    EXPECT_EQ(mock.calls(), 0u);
}

TEST(FillMask, UnknownTargetIsTokenNotInVocabulary) {
    MockFillMaskProvider mock({"a"});
    try {
        mock.fill_mask({{"zzz"}, 0, "zzz", false});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TokenNotInVocabulary);
    }
}

TEST(FillMask, InconsistentDistributionIsRejected) {
    FillMaskQuery q{{"a"}, 0, "a", true};
    EXPECT_THROW(parse_fill_mask_response(R"({"target_probability":0.5,"distribution":[0.5,0.2],"target_index":0})", q),
                 Error);
    EXPECT_THROW(parse_fill_mask_response(R"({"target_probability":0.4,"distribution":[0.5,0.5],"target_index":0})", q),
                 Error);
    EXPECT_NO_THROW(
        parse_fill_mask_response(R"({"target_probability":0.5,"distribution":[0.5,0.5],"target_index":0})", q));
}

TEST(FillMask, HttpClientUsesTheWireContract) {
    auto t = std::make_shared<FakeTransport>(std::deque<HttpResponse>{
        {200, R"({"target_probability":0.25})"}, {200, R"({"tokens":["read","ability"]})"}});
    HttpFillMaskProvider p({.base_url = "http://x"}, t);
    EXPECT_DOUBLE_EQ(p.fill_mask({{"a", "b"}, 0, "a", false}).target_probability, 0.25);
    EXPECT_EQ(t->paths[0], "/fill-mask");
    const auto body = json::parse(t->bodies[0]);
    EXPECT_EQ(body["masked_index"], 0);
    EXPECT_EQ(body["target_token"], "a");
    EXPECT_EQ(p.split_word("readability").pieces, (std::vector<std::string>{"read", "ability"}));
    EXPECT_EQ(t->paths[1], "/tokenize");
}

// ------------------------------------------------------------------ cache

TEST(Cache, SecondIdenticalRequestMakesNoProviderCall) {
    const auto dir = fresh_dir("hit");
    auto mock = MockChatProvider::by_text({{"Rate", three_of_six()}});
    auto cache = std::make_shared<ResponseCache>(dir);
    CachedChatProvider cached(mock, cache);
    const auto a = cached.complete(request());
    const auto b = cached.complete(request());
    EXPECT_EQ(mock->calls(), 1u);
    EXPECT_EQ(a.raw_payload, b.raw_payload);
    EXPECT_EQ(cache->hits(), 1u);
    EXPECT_EQ(cache->misses(), 1u);

    // A fresh process sees the persisted record.
    auto reopened = std::make_shared<ResponseCache>(dir, CacheMode::replay_only);
    CachedChatProvider replay(std::make_shared<ReplayOnlyChatProvider>("mock-chat"), reopened);
    EXPECT_EQ(replay.complete(request()).raw_payload, a.raw_payload);
    std::filesystem::remove_all(dir);
}

TEST(Cache, KeysSeparateProviderModelBodyAndAttempt) {
    const auto base = CachedChatProvider::cache_key("openai-chat", request());
    EXPECT_NE(base, CachedChatProvider::cache_key("mock-chat", request()));
    auto r = request();
    r.model_id = "other";
    EXPECT_NE(base, CachedChatProvider::cache_key("openai-chat", r));
    r = request();
    r.attempt = 1;
    EXPECT_NE(base, CachedChatProvider::cache_key("openai-chat", r));
    EXPECT_EQ(base, CachedChatProvider::cache_key("openai-chat", request()));
    EXPECT_EQ(base.size(), 64u);
}

TEST(Cache, CorruptRecordIsRecomputedAndReappended) {
    const auto dir = fresh_dir("corrupt");
    auto mock = MockChatProvider::by_text({{"Rate", three_of_six()}});
    {
        CachedChatProvider cached(mock, std::make_shared<ResponseCache>(dir));
        cached.complete(request());
    }
    // Flip one character of the stored payload so the checksum fails.
    const auto file = dir / "responses.jsonl";
    std::string content;
    {
        std::ifstream in(file);
        std::getline(in, content);
    }
    auto rec = json::parse(content);
    auto raw = rec["raw_response"].get<std::string>();
    raw[raw.find("Answer")] = 'X';
    rec["raw_response"] = raw;
    {
        std::ofstream out(file, std::ios::trunc);
        out << rec.dump() << '\n';
    }
    EXPECT_EQ(ResponseCache::verify(dir).corrupt, 1u);

    CachedChatProvider cached(mock, std::make_shared<ResponseCache>(dir));
    const auto resp = cached.complete(request());
    EXPECT_EQ(mock->calls(), 2u);
    EXPECT_NE(resp.text.find("Answer"), std::string::npos);
    const auto report = ResponseCache::verify(dir);
    EXPECT_EQ(report.records, 2u);
    EXPECT_EQ(report.valid, 1u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, ReplayMissNeverReachesTheProvider) {
    const auto dir = fresh_dir("replay");
    auto mock = MockChatProvider::by_text({{"Rate", three_of_six()}});
    CachedChatProvider cached(mock, std::make_shared<ResponseCache>(dir, CacheMode::replay_only));
    try {
        cached.complete(request());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ReplayMiss);
    }
    EXPECT_EQ(mock->calls(), 0u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, ConcurrentAppendsKeepEveryLineIntact) {
    const auto dir = fresh_dir("concurrent");
    auto cache = std::make_shared<ResponseCache>(dir);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                const std::string body = "req-" + std::to_string(t) + "-" + std::to_string(i);
                cache->get_or_compute(ResponseCache::make_key("p", "m", body), body,
                                      [&] { return std::string(1000 + i, static_cast<char>('a' + t)); });
            }
        });
    }
    for (auto& th : threads) th.join();
    const auto report = ResponseCache::verify(dir);
    EXPECT_EQ(report.records, 400u);
    EXPECT_EQ(report.valid, 400u);
    EXPECT_EQ(report.distinct_keys, 400u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, FillMaskDecoratorCachesBothEndpoints) {
    const auto dir = fresh_dir("fillmask");
    auto mock = std::make_shared<MockFillMaskProvider>(std::vector<std::string>{"a", "b"});
    CachedFillMaskProvider cached(mock, std::make_shared<ResponseCache>(dir));
    cached.fill_mask({{"a", "b"}, 0, "a", false});
    cached.fill_mask({{"a", "b"}, 0, "a", false});
    cached.split_word("a");
    cached.split_word("a");
    EXPECT_EQ(mock->calls(), 2u);
    std::filesystem::remove_all(dir);
}
