#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readctl/metrics.hpp"
#include "readctl/provider.hpp"

namespace readctl {

/// Per-token vectors for one text, in the provider's own tokenization.
struct TokenEmbeddings {
    std::vector<std::string> tokens;
    std::vector<Embedding> vectors;
    bool truncated = false;
};

/// Safe for concurrent embed() calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<TokenEmbeddings> embed(std::span<const std::string> texts) = 0;
    virtual std::string model() const = 0;
    virtual std::size_t dimension() const = 0;
};

/// Static vectors read from a `token<TAB>v1 v2 ...` file. Tokens are
/// textcore's normalized tokens; a token missing from the table maps to a
/// pseudo-random unit vector seeded by its hash, so the same word always
/// gets the same vector.
class LexiconEmbeddingProvider final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimension = 64;

    /// Hashed vectors only.
    explicit LexiconEmbeddingProvider(std::size_t dimension = kDefaultDimension);
    /// Throws StorageError, ConfigError on a bad line or inconsistent dimension.
    static LexiconEmbeddingProvider load(const std::filesystem::path& path);
    static LexiconEmbeddingProvider parse(std::string_view contents);

    std::vector<TokenEmbeddings> embed(std::span<const std::string> texts) override;
    std::string model() const override { return "lexicon"; }
    std::size_t dimension() const override { return dim_; }

    Embedding vector_for(std::string_view token) const;
    std::size_t size() const noexcept { return table_.size(); }

private:
    std::size_t dim_;
    std::map<std::string, Embedding, std::less<>> table_;
};

struct EmbeddingHealth {
    std::string model;
    std::size_t dimension = 0;
    bool ready = false;
};

struct HttpEmbeddingConfig {
    std::string endpoint;  // base URL of the service
    std::string model;     // sent with each request; empty lets the service choose
    RetryPolicy retry;
    std::chrono::milliseconds request_timeout{60'000};
};

/// Client for the embedding sidecar: POST /embed and GET /health.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config, Sleeper sleep = {});

    /// Throws ProviderError subclasses; MalformedResponse when shapes disagree.
    std::vector<TokenEmbeddings> embed(std::span<const std::string> texts) override;
    /// Throws ProviderError when the service is unreachable or not ready.
    EmbeddingHealth health() const;

    /// From the last /embed or /health reply; 0 before either.
    std::string model() const override;
    std::size_t dimension() const override;

private:
    HttpEmbeddingConfig config_;
    Sleeper sleep_;
    mutable std::mutex mu_;
    mutable std::string model_;
    mutable std::size_t dim_ = 0;
};

/// Semantic score of two texts through one provider.
SemanticScore semantic_score(EmbeddingProvider& provider, const std::string& source, const std::string& generated);

}  // namespace readctl
