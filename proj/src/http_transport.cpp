// The only translation unit that sees httplib.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <atomic>
#include <regex>

#include "ara/error.hpp"
#include "ara/providers.hpp"

namespace ara::providers {

namespace {

std::atomic<std::uint64_t> g_live_calls{0};

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string prefix; // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) {
        raise(ErrorCode::InvalidConfig, "endpoint must be an http(s) URL: '" + url + "'");
    }
    std::string prefix = m[2].matched ? m[2].str() : "";
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {m[1].str(), prefix};
}

class HttplibTransport : public HttpTransport {
public:
    HttplibTransport(const std::string& base_url, std::chrono::seconds timeout)
        : url_(split_url(base_url)), timeout_(timeout) {}

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override {
        // A client per call: httplib clients are not meant for concurrent use.
        httplib::Client client(url_.origin);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);
        httplib::Headers h;
        std::string content_type = "application/json";
        for (const auto& [k, v] : headers) {
            if (k == "Content-Type") {
                content_type = v;
            } else {
                h.emplace(k, v);
            }
        }
        ++g_live_calls;
        auto res = client.Post(url_.prefix + path, h, body, content_type);
        if (!res) {
            raise(ErrorCode::TransportError, "request to " + url_.origin + url_.prefix + path +
                                                 " failed: " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

private:
    SplitUrl url_;
    std::chrono::seconds timeout_;
};

} // namespace

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url, std::chrono::seconds timeout) {
    return std::make_shared<HttplibTransport>(base_url, timeout);
}

std::uint64_t live_network_calls() noexcept { return g_live_calls.load(); }

} // namespace ara::providers
