#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "readctl/mock_rewriter.hpp"
#include "readctl/prompts.hpp"
#include "readctl/records.hpp"

namespace readctl {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_delay{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{30'000};

    /// Delay before retry number `attempt` (1-based).
    std::chrono::milliseconds delay(int attempt) const;
};

enum class ProviderKind { Mock, ChatHttp };

std::string to_string(ProviderKind kind);
/// "mock" or "chat-http". Throws ConfigError.
ProviderKind provider_kind_from_string(const std::string& s);

/// Provider settings. The credential itself is never part of the config;
/// `api_key_env` names the environment variable that holds it.
struct ProviderConfig {
    ProviderKind kind = ProviderKind::Mock;
    std::string endpoint;
    std::string model_name;
    std::string api_key_env;
    double temperature = 1.0;
    RetryPolicy retry;
    std::chrono::milliseconds request_timeout{60'000};
    int max_in_flight = 4;
    /// 0 disables the rate limit.
    double requests_per_second = 0.0;
    std::string system_message{kDefaultSystemMessage};
    std::uint64_t seed = 0;

    /// Throws ConfigError when a chat-http config lacks endpoint or model.
    void validate() const;
};

void to_json(nlohmann::json& j, const RetryPolicy& r);
void from_json(const nlohmann::json& j, RetryPolicy& r);
void to_json(nlohmann::json& j, const ProviderConfig& c);
void from_json(const nlohmann::json& j, ProviderConfig& c);

struct ProviderOutput {
    std::string text;
    ProviderMeta meta;
};

/// Safe for concurrent generate() calls.
class Provider {
public:
    virtual ~Provider() = default;
    /// Throws a ProviderError subclass on failure.
    virtual ProviderOutput generate(const ChatRequest& request) = 0;
    /// Cheap local checks run before a job starts. Throws AuthError when a
    /// required credential is missing.
    virtual void preflight() const {}
};

/// Offline provider backed by mock_rewrite; never touches the network.
class MockProvider final : public Provider {
public:
    explicit MockProvider(std::uint64_t seed = 0, MockRewriteOptions options = {});
    ProviderOutput generate(const ChatRequest& request) override;

private:
    std::uint64_t seed_;
    MockRewriteOptions options_;
};

/// Token bucket shared by all threads of one provider.
class RateLimiter {
public:
    /// rate <= 0 disables limiting.
    explicit RateLimiter(double per_second, double burst = 1.0);
    void acquire();

private:
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mu_;
};

/// Chat-completions client: POSTs {model, messages, temperature} and reads
/// choices[0].message.content. Retries connection errors, timeouts, 429 and
/// 5xx with exponential backoff; 401/403 raise AuthError at once.
class ChatHttpProvider final : public Provider {
public:
    /// `sleep` defaults to std::this_thread::sleep_for.
    explicit ChatHttpProvider(ProviderConfig config, Sleeper sleep = {});
    ~ChatHttpProvider() override;

    ProviderOutput generate(const ChatRequest& request) override;
    void preflight() const override;

private:
    std::string credential() const;

    ProviderConfig config_;
    Sleeper sleep_;
    std::counting_semaphore<1024> in_flight_;
    RateLimiter limiter_;
};

/// Throws ConfigError on an invalid config.
std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace readctl
