#include "readctl/provider.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "http.hpp"
#include "readctl/errors.hpp"

namespace readctl {

std::chrono::milliseconds RetryPolicy::delay(int attempt) const {
    const double ms = static_cast<double>(initial_delay.count()) * std::pow(multiplier, std::max(0, attempt - 1));
    const double capped = std::min(ms, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<long long>(capped));
}

std::string to_string(ProviderKind kind) {
    return kind == ProviderKind::Mock ? "mock" : "chat-http";
}

ProviderKind provider_kind_from_string(const std::string& s) {
    if (s == "mock") {
        return ProviderKind::Mock;
    }
    if (s == "chat-http") {
        return ProviderKind::ChatHttp;
    }
    throw ConfigError("unknown provider \"" + s + "\" (expected mock or chat-http)");
}

void ProviderConfig::validate() const {
    if (temperature < 0.0) {
        throw ConfigError("temperature must be >= 0");
    }
    if (retry.max_retries < 0) {
        throw ConfigError("max_retries must be >= 0");
    }
    if (max_in_flight < 1 || max_in_flight > 1024) {
        throw ConfigError("max_in_flight must be in [1, 1024]");
    }
    if (kind == ProviderKind::ChatHttp) {
        if (endpoint.empty()) {
            throw ConfigError("chat-http provider requires an endpoint");
        }
        if (model_name.empty()) {
            throw ConfigError("chat-http provider requires a model name");
        }
        http::parse_endpoint(endpoint, "/");
    }
}

void to_json(nlohmann::json& j, const RetryPolicy& r) {
    j = {{"max_retries", r.max_retries},
         {"initial_delay_ms", r.initial_delay.count()},
         {"multiplier", r.multiplier},
         {"max_delay_ms", r.max_delay.count()}};
}

void from_json(const nlohmann::json& j, RetryPolicy& r) {
    r.max_retries = j.value("max_retries", r.max_retries);
    r.initial_delay = std::chrono::milliseconds(j.value("initial_delay_ms", r.initial_delay.count()));
    r.multiplier = j.value("multiplier", r.multiplier);
    r.max_delay = std::chrono::milliseconds(j.value("max_delay_ms", r.max_delay.count()));
}

void to_json(nlohmann::json& j, const ProviderConfig& c) {
    j = {{"kind", to_string(c.kind)},
         {"endpoint", c.endpoint},
         {"model_name", c.model_name},
         {"api_key_env", c.api_key_env},
         {"temperature", c.temperature},
         {"retry", c.retry},
         {"request_timeout_ms", c.request_timeout.count()},
         {"max_in_flight", c.max_in_flight},
         {"requests_per_second", c.requests_per_second},
         {"system_message", c.system_message},
         {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ProviderConfig& c) {
    c.kind = provider_kind_from_string(j.value("kind", std::string("mock")));
    c.endpoint = j.value("endpoint", std::string{});
    c.model_name = j.value("model_name", std::string{});
    c.api_key_env = j.value("api_key_env", std::string{});
    c.temperature = j.value("temperature", 1.0);
    if (j.contains("retry")) {
        j.at("retry").get_to(c.retry);
    }
    c.request_timeout = std::chrono::milliseconds(j.value("request_timeout_ms", c.request_timeout.count()));
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.requests_per_second = j.value("requests_per_second", 0.0);
    c.system_message = j.value("system_message", std::string(kDefaultSystemMessage));
    c.seed = j.value("seed", std::uint64_t{0});
}

MockProvider::MockProvider(std::uint64_t seed, MockRewriteOptions options) : seed_(seed), options_(options) {}

ProviderOutput MockProvider::generate(const ChatRequest& request) {
    ProviderOutput out;
    try {
        out.text = mock_rewrite(request.document, request.target_level, seed_, options_).text;
    } catch (const EmptyText&) {
        out.text.clear();
    }
    out.meta.model = "mock";
    return out;
}

RateLimiter::RateLimiter(double per_second, double burst)
    : rate_(per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    if (rate_ <= 0.0) {
        return;
    }
    std::unique_lock lock(mu_);
    for (;;) {
        const auto now = std::chrono::steady_clock::now();
        tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        // sleeping with the lock held keeps waiters in line
        std::this_thread::sleep_for(std::chrono::duration<double>((1.0 - tokens_) / rate_));
    }
}

ChatHttpProvider::ChatHttpProvider(ProviderConfig config, Sleeper sleep)
    : config_(std::move(config)),
      sleep_(std::move(sleep)),
      in_flight_(std::clamp(config_.max_in_flight, 1, 1024)),
      limiter_(config_.requests_per_second) {
    config_.validate();
}

ChatHttpProvider::~ChatHttpProvider() = default;

std::string ChatHttpProvider::credential() const {
    if (config_.api_key_env.empty()) {
        return {};
    }
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw AuthError("environment variable " + config_.api_key_env + " is not set");
    }
    return key;
}

void ChatHttpProvider::preflight() const {
    credential();
}

ProviderOutput ChatHttpProvider::generate(const ChatRequest& request) {
    std::map<std::string, std::string> headers;
    if (const auto key = credential(); !key.empty()) {
        headers["Authorization"] = "Bearer " + key;
    }

    nlohmann::json payload;
    payload["model"] = config_.model_name;
    payload["temperature"] = config_.temperature;
    payload["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) {
        payload["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }

    const auto endpoint = http::parse_endpoint(config_.endpoint, "/v1/chat/completions");
    http::CallOptions opts{config_.retry, config_.request_timeout, sleep_};

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{in_flight_};
    limiter_.acquire();

    const auto start = std::chrono::steady_clock::now();
    const http::Reply reply = http::call(endpoint, endpoint.path, true, payload.dump(), headers, opts);
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    ProviderOutput out;
    try {
        const auto body = nlohmann::json::parse(reply.body);
        const auto& content = body.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) {
            throw MalformedResponse("choices[0].message.content is not a string");
        }
        out.text = content.get<std::string>();
        out.meta.model = body.value("model", config_.model_name);
        if (body.contains("usage") && body["usage"].is_object()) {
            const auto& u = body["usage"];
            if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number_integer()) {
                out.meta.prompt_tokens = u["prompt_tokens"].get<int>();
            }
            if (u.contains("completion_tokens") && u["completion_tokens"].is_number_integer()) {
                out.meta.completion_tokens = u["completion_tokens"].get<int>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("unexpected response body: ") + e.what());
    }
    out.meta.latency_ms = latency;
    out.meta.retries = reply.retries;
    return out;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    config.validate();
    if (config.kind == ProviderKind::Mock) {
        return std::make_unique<MockProvider>(config.seed);
    }
    return std::make_unique<ChatHttpProvider>(config);
}

}  // namespace readctl
