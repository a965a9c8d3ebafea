#pragma once

// Shared HTTP plumbing for the chat and embedding clients.

#include <chrono>
#include <map>
#include <string>

#include "readctl/provider.hpp"

namespace readctl::http {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

/// Splits a URL into base and path; an empty path becomes `default_path`.
/// Throws ConfigError.
Endpoint parse_endpoint(const std::string& url, const std::string& default_path);

struct CallOptions {
    RetryPolicy retry;
    std::chrono::milliseconds timeout{60'000};
    Sleeper sleep;
};

struct Reply {
    int status = 0;
    std::string body;
    int retries = 0;
};

/// GET when `body` is empty and `post` is false, POST otherwise. Returns on
/// 2xx. Throws AuthError (401/403), RateLimitExhausted, TimeoutError or
/// TransportError once retries are spent.
Reply call(const Endpoint& endpoint, const std::string& path, bool post, const std::string& body,
           const std::map<std::string, std::string>& headers, const CallOptions& options);

}  // namespace readctl::http
