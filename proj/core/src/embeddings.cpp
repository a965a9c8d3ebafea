#include "readctl/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hash.hpp"
#include "http.hpp"
#include "readctl/errors.hpp"
#include "readctl/textcore.hpp"

namespace readctl {

LexiconEmbeddingProvider::LexiconEmbeddingProvider(std::size_t dimension) : dim_(dimension) {
    if (dim_ == 0) {
        throw ConfigError("embedding dimension must be positive");
    }
}

LexiconEmbeddingProvider LexiconEmbeddingProvider::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot read embedding lexicon " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

LexiconEmbeddingProvider LexiconEmbeddingProvider::parse(std::string_view contents) {
    std::map<std::string, Embedding, std::less<>> table;
    std::size_t dim = 0;
    std::size_t line_no = 0;
    std::istringstream in{std::string(contents)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ConfigError("embedding lexicon line " + std::to_string(line_no) + ": missing tab");
        }
        Embedding v;
        std::istringstream nums(line.substr(tab + 1));
        double x = 0;
        while (nums >> x) {
            v.push_back(x);
        }
        if (!nums.eof() || v.empty()) {
            throw ConfigError("embedding lexicon line " + std::to_string(line_no) + ": bad vector");
        }
        if (dim == 0) {
            dim = v.size();
        } else if (v.size() != dim) {
            throw ConfigError("embedding lexicon line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim) + " values, got " + std::to_string(v.size()));
        }
        table[to_lower_ascii(line.substr(0, tab))] = std::move(v);
    }
    LexiconEmbeddingProvider p(dim == 0 ? kDefaultDimension : dim);
    p.table_ = std::move(table);
    return p;
}

Embedding LexiconEmbeddingProvider::vector_for(std::string_view token) const {
    if (const auto it = table_.find(token); it != table_.end()) {
        return it->second;
    }
    // Box-Muller gives an isotropic direction
    std::uint64_t state = detail::fnv1a64(token);
    Embedding v(dim_);
    double norm = 0.0;
    for (std::size_t i = 0; i < dim_; i += 2) {
        const double u1 = (static_cast<double>(detail::splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(detail::splitmix64(state) >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        v[i] = r * std::cos(2.0 * M_PI * u2);
        if (i + 1 < dim_) {
            v[i + 1] = r * std::sin(2.0 * M_PI * u2);
        }
    }
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

std::vector<TokenEmbeddings> LexiconEmbeddingProvider::embed(std::span<const std::string> texts) {
    std::vector<TokenEmbeddings> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        TokenEmbeddings e;
        e.tokens = normalized_tokens(t);
        e.vectors.reserve(e.tokens.size());
        for (const auto& tok : e.tokens) {
            e.vectors.push_back(vector_for(tok));
        }
        out.push_back(std::move(e));
    }
    return out;
}

namespace {

std::string route(const http::Endpoint& ep, std::string_view leaf) {
    std::string prefix = ep.path;
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return prefix + std::string(leaf);
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config, Sleeper sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
    if (config_.endpoint.empty()) {
        throw ConfigError("embedding service requires an endpoint");
    }
    http::parse_endpoint(config_.endpoint, "/");
}

std::vector<TokenEmbeddings> HttpEmbeddingProvider::embed(std::span<const std::string> texts) {
    if (texts.empty()) {
        return {};
    }
    const auto ep = http::parse_endpoint(config_.endpoint, "/");
    nlohmann::json req{{"texts", texts}};
    if (!config_.model.empty()) {
        req["model"] = config_.model;
    }
    const auto reply = http::call(ep, route(ep, "/embed"), true, req.dump(), {}, {config_.retry, config_.request_timeout, sleep_});

    std::vector<TokenEmbeddings> out;
    std::size_t dim = 0;
    std::string model;
    try {
        const auto body = nlohmann::json::parse(reply.body);
        dim = body.at("dimension").get<std::size_t>();
        model = body.value("model", std::string{});
        const auto& results = body.at("results");
        if (!results.is_array() || results.size() != texts.size()) {
            throw MalformedResponse("embedding response has " + std::to_string(results.size()) + " results for " +
                                    std::to_string(texts.size()) + " texts");
        }
        for (const auto& r : results) {
            TokenEmbeddings e;
            e.tokens = r.at("tokens").get<std::vector<std::string>>();
            e.vectors = r.at("vectors").get<std::vector<Embedding>>();
            e.truncated = r.value("truncated", false);
            if (e.tokens.size() != e.vectors.size()) {
                throw MalformedResponse("token and vector counts differ");
            }
            for (const auto& v : e.vectors) {
                if (v.size() != dim) {
                    throw MalformedResponse("vector of dimension " + std::to_string(v.size()) + ", expected " +
                                            std::to_string(dim));
                }
            }
            out.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("unexpected embedding response: ") + e.what());
    }
    std::lock_guard lock(mu_);
    model_ = model;
    dim_ = dim;
    return out;
}

EmbeddingHealth HttpEmbeddingProvider::health() const {
    const auto ep = http::parse_endpoint(config_.endpoint, "/");
    const auto reply = http::call(ep, route(ep, "/health"), false, "", {}, {config_.retry, config_.request_timeout, sleep_});
    EmbeddingHealth h;
    try {
        const auto body = nlohmann::json::parse(reply.body);
        h.model = body.value("model", std::string{});
        h.dimension = body.value("dimension", std::size_t{0});
        h.ready = body.value("ready", false);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("unexpected health response: ") + e.what());
    }
    std::lock_guard lock(mu_);
    model_ = h.model;
    dim_ = h.dimension;
    return h;
}

std::string HttpEmbeddingProvider::model() const {
    std::lock_guard lock(mu_);
    return model_;
}

std::size_t HttpEmbeddingProvider::dimension() const {
    std::lock_guard lock(mu_);
    return dim_;
}

SemanticScore semantic_score(EmbeddingProvider& provider, const std::string& source, const std::string& generated) {
    const std::string texts[] = {source, generated};
    const auto e = provider.embed(texts);
    if (e.size() != 2) {
        throw MalformedResponse("embedding provider returned " + std::to_string(e.size()) + " results for 2 texts");
    }
    return semantic_score(e[0].vectors, e[1].vectors);
}

}  // namespace readctl
