#include "ara/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>

#include "ara/error.hpp"
#include "hash.hpp"
#include "json.hpp"
#include "log.hpp"

namespace ara::providers {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kCacheFile = "responses.jsonl";

std::string checksum_of(std::string_view key, std::string_view raw) {
    std::string material(key);
    material += '\n';
    material += raw;
    return detail::sha256_hex(material);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ParsedRecord {
    std::string key;
    std::string raw;
};

/// nullopt when the line is not a record or fails its checksum.
std::optional<ParsedRecord> parse_record(const std::string& line) {
    try {
        const auto doc = json::parse(line);
        ParsedRecord r{doc.at("key").get<std::string>(), doc.at("raw_response").get<std::string>()};
        if (doc.at("checksum").get<std::string>() != checksum_of(r.key, r.raw)) return std::nullopt;
        return r;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

template <typename F>
void for_each_line(const fs::path& file, F&& f) {
    std::ifstream in(file, std::ios::binary);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        f(number, line);
    }
}

} // namespace

ResponseCache::ResponseCache(fs::path dir, CacheMode mode) : file_(std::move(dir) / kCacheFile), mode_(mode) {
    std::error_code ec;
    fs::create_directories(file_.parent_path(), ec);
    if (ec && mode_ == CacheMode::read_write) {
        raise(ErrorCode::InvalidConfig, "cannot create cache directory " + file_.parent_path().string());
    }
    std::size_t corrupt = 0;
    for_each_line(file_, [&](std::size_t number, const std::string& line) {
        if (auto rec = parse_record(line)) {
            index_[rec->key] = std::move(rec->raw); // later records supersede earlier ones
        } else {
            ++corrupt;
            detail::logger().warn("{}: CacheCorrupt record at line {} ignored; it will be recomputed", file_.string(),
                                  number);
        }
    });
    if (corrupt > 0) {
        detail::logger().warn("{}: {} corrupt record(s) treated as misses", file_.string(), corrupt);
    }
}

std::string ResponseCache::make_key(std::string_view provider_id, std::string_view model_id,
                                    std::string_view request_body) {
    std::string material;
    material.reserve(provider_id.size() + model_id.size() + request_body.size() + 2);
    material += provider_id;
    material += '\n';
    material += model_id;
    material += '\n';
    material += request_body;
    return detail::sha256_hex(material);
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    return std::nullopt;
}

void ResponseCache::append(const std::string& key, std::string_view request_body, std::string_view raw_response) {
    if (mode_ == CacheMode::replay_only) {
        raise(ErrorCode::PreconditionViolation, "replay-only cache is read-only");
    }
    json request = json::parse(request_body, nullptr, false);
    if (request.is_discarded()) request = std::string(request_body);
    const json record{{"key", key},
                      {"timestamp", utc_timestamp()},
                      {"request", std::move(request)},
                      {"raw_response", raw_response},
                      {"checksum", checksum_of(key, raw_response)}};
    const std::string line = record.dump() + "\n";

    std::lock_guard lock(mutex_);
    const int fd = ::open(file_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) {
        raise(ErrorCode::InvalidConfig, "cannot open cache file " + file_.string() + ": " + std::strerror(errno));
    }
    const auto written = ::write(fd, line.data(), line.size());
    const int saved = errno;
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size())) {
        raise(ErrorCode::InvalidConfig, "short write to cache file " + file_.string() + ": " + std::strerror(saved));
    }
    index_[key] = std::string(raw_response);
}

std::string ResponseCache::get_or_compute(const std::string& key, std::string_view request_body,
                                          const std::function<std::string()>& compute) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = index_.find(key); it != index_.end()) {
            ++hits_;
            return it->second;
        }
        ++misses_;
    }
    if (mode_ == CacheMode::replay_only) {
        raise(ErrorCode::ReplayMiss, "no cached response for key " + key);
    }
    auto raw = compute();
    append(key, request_body, raw);
    return raw;
}

std::size_t ResponseCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

std::size_t ResponseCache::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

CacheVerifyReport ResponseCache::verify(const fs::path& dir) {
    CacheVerifyReport report;
    std::set<std::string> keys;
    for_each_line(dir / kCacheFile, [&](std::size_t, const std::string& line) {
        ++report.records;
        if (auto rec = parse_record(line)) {
            ++report.valid;
            keys.insert(rec->key);
        } else {
            ++report.corrupt;
        }
    });
    report.distinct_keys = keys.size();
    return report;
}

// ----------------------------------------------------------- decorators

CachedChatProvider::CachedChatProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
    require(inner_ && cache_, "cached chat provider needs a provider and a cache");
}

namespace {

std::string chat_key_material(const ChatRequest& req) {
    auto body = chat_request_body(req);
    if (req.attempt > 0) body += "\nattempt=" + std::to_string(req.attempt);
    return body;
}

} // namespace

std::string CachedChatProvider::cache_key(std::string_view provider_id, const ChatRequest& req) {
    return ResponseCache::make_key(provider_id, req.model_id, chat_key_material(req));
}

std::string CachedChatProvider::complete_payload(const ChatRequest& req) {
    const auto material = chat_key_material(req);
    return cache_->get_or_compute(ResponseCache::make_key(inner_->id(), req.model_id, material), material,
                                  [&] { return inner_->complete_payload(req); });
}

CachedFillMaskProvider::CachedFillMaskProvider(std::shared_ptr<FillMaskProvider> inner,
                                               std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
    require(inner_ && cache_, "cached fill-mask provider needs a provider and a cache");
}

std::string CachedFillMaskProvider::fill_mask_payload(const FillMaskQuery& q) {
    const auto body = fill_mask_request_body(q);
    return cache_->get_or_compute(ResponseCache::make_key(inner_->id(), "fill-mask", body), body,
                                  [&] { return inner_->fill_mask_payload(q); });
}

std::string CachedFillMaskProvider::tokenize_payload(const std::string& word) {
    const auto body = tokenize_request_body(word);
    return cache_->get_or_compute(ResponseCache::make_key(inner_->id(), "tokenize", body), body,
                                  [&] { return inner_->tokenize_payload(word); });
}

std::string ReplayOnlyChatProvider::complete_payload(const ChatRequest&) {
    raise(ErrorCode::ReplayMiss, "replay-only run has no live chat endpoint");
}

std::string ReplayOnlyFillMaskProvider::fill_mask_payload(const FillMaskQuery&) {
    raise(ErrorCode::ReplayMiss, "replay-only run has no live fill-mask endpoint");
}

std::string ReplayOnlyFillMaskProvider::tokenize_payload(const std::string&) {
    raise(ErrorCode::ReplayMiss, "replay-only run has no live fill-mask endpoint");
}

} // namespace ara::providers
