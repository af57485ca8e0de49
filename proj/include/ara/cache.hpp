#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "ara/providers.hpp"

namespace ara::providers {

enum class CacheMode { read_write, replay_only };

struct CacheVerifyReport {
    std::size_t records = 0;
    std::size_t valid = 0;
    std::size_t corrupt = 0;
    std::size_t distinct_keys = 0;
};

/// Append-only JSONL store of raw provider payloads, one record per line:
/// {key, timestamp, request, raw_response, checksum}. The key is the SHA-256
/// of (provider id, model id, request body); the checksum is the SHA-256 of
/// key and raw_response. Records that fail their checksum are ignored with a
/// warning, so the request is recomputed and re-appended.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir, CacheMode mode = CacheMode::read_write);

    static std::string make_key(std::string_view provider_id, std::string_view model_id,
                                std::string_view request_body);

    std::optional<std::string> lookup(const std::string& key) const;

    /// One write(2) on an O_APPEND descriptor under a lock, so concurrent
    /// writers never interleave partial lines.
    void append(const std::string& key, std::string_view request_body, std::string_view raw_response);

    /// Returns the cached payload or computes, stores and returns it. In
    /// replay-only mode a miss raises ReplayMiss without calling `compute`.
    std::string get_or_compute(const std::string& key, std::string_view request_body,
                               const std::function<std::string()>& compute);

    CacheMode mode() const noexcept { return mode_; }
    const std::filesystem::path& file() const noexcept { return file_; }
    std::size_t hits() const;
    std::size_t misses() const;

    static CacheVerifyReport verify(const std::filesystem::path& dir);

private:
    std::filesystem::path file_;
    CacheMode mode_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> index_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

class CachedChatProvider : public ChatProvider {
public:
    CachedChatProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<ResponseCache> cache);
    std::string id() const override { return inner_->id(); }
    std::string complete_payload(const ChatRequest& req) override;
    static std::string cache_key(std::string_view provider_id, const ChatRequest& req);

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<ResponseCache> cache_;
};

class CachedFillMaskProvider : public FillMaskProvider {
public:
    CachedFillMaskProvider(std::shared_ptr<FillMaskProvider> inner, std::shared_ptr<ResponseCache> cache);
    std::string id() const override { return inner_->id(); }
    std::string fill_mask_payload(const FillMaskQuery& q) override;
    std::string tokenize_payload(const std::string& word) override;

private:
    std::shared_ptr<FillMaskProvider> inner_;
    std::shared_ptr<ResponseCache> cache_;
};

/// Stand-ins used in replay-only runs when no endpoint is configured. They
/// carry the ids of the HTTP providers so cached records still match, and
/// raise ReplayMiss if the cache ever falls through to them.
class ReplayOnlyChatProvider : public ChatProvider {
public:
    explicit ReplayOnlyChatProvider(std::string id = "openai-chat") : id_(std::move(id)) {}
    std::string id() const override { return id_; }
    std::string complete_payload(const ChatRequest& req) override;

private:
    std::string id_;
};

class ReplayOnlyFillMaskProvider : public FillMaskProvider {
public:
    explicit ReplayOnlyFillMaskProvider(std::string id = "http-fill-mask") : id_(std::move(id)) {}
    std::string id() const override { return id_; }
    std::string fill_mask_payload(const FillMaskQuery& q) override;
    std::string tokenize_payload(const std::string& word) override;

private:
    std::string id_;
};

} // namespace ara::providers
