#include "http.hpp"

#include <httplib.h>

#include <thread>

#include "readctl/errors.hpp"

namespace readctl::http {

Endpoint parse_endpoint(const std::string& url, const std::string& default_path) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must start with http:// or https://: " + url);
    }
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("unsupported endpoint scheme: " + scheme);
    }
    const auto path_begin = url.find('/', scheme_end + 3);
    Endpoint e;
    e.base = url.substr(0, path_begin);
    e.path = path_begin == std::string::npos ? std::string{} : url.substr(path_begin);
    if (e.path.empty() || e.path == "/") {
        e.path = default_path;
    }
    if (e.base.size() <= scheme_end + 3) {
        throw ConfigError("endpoint has no host: " + url);
    }
    return e;
}

namespace {

enum class Failure { None, Retryable429, Retryable5xx, Timeout, Connection };

}  // namespace

Reply call(const Endpoint& endpoint, const std::string& path, bool post, const std::string& body,
           const std::map<std::string, std::string>& headers, const CallOptions& options) {
    const Sleeper sleep = options.sleep ? options.sleep : Sleeper([](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    });
    httplib::Client client(endpoint.base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers hs;
    for (const auto& [k, v] : headers) {
        hs.emplace(k, v);
    }

    Reply reply;
    std::string last_error;
    Failure last = Failure::None;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 0) {
            auto delay = options.retry.delay(attempt);
            sleep(delay);
        }
        auto res = post ? client.Post(path, hs, body, "application/json") : client.Get(path, hs);
        if (!res) {
            const auto err = res.error();
            last = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) ? Failure::Timeout
                                                                                            : Failure::Connection;
            last_error = httplib::to_string(err);
        } else if (res->status == 401 || res->status == 403) {
            throw AuthError("endpoint rejected the credential (HTTP " + std::to_string(res->status) + ")");
        } else if (res->status >= 200 && res->status < 300) {
            reply.status = res->status;
            reply.body = res->body;
            reply.retries = attempt;
            return reply;
        } else if (res->status == 429) {
            last = Failure::Retryable429;
            last_error = "HTTP 429";
        } else if (res->status >= 500) {
            last = Failure::Retryable5xx;
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }
        if (attempt >= options.retry.max_retries) {
            break;
        }
    }
    const std::string tries = " after " + std::to_string(options.retry.max_retries + 1) + " attempts";
    switch (last) {
        case Failure::Retryable429:
            throw RateLimitExhausted("rate limited" + tries);
        case Failure::Timeout:
            throw TimeoutError("request timed out (" + last_error + ")" + tries);
        default:
            throw TransportError(last_error + tries);
    }
}

}  // namespace readctl::http
