#include "settings.hpp"

#include <algorithm>
#include <charconv>
#include <type_traits>
#include <fstream>
#include <sstream>

#include "readctl/errors.hpp"

namespace readctl::cli {

const std::vector<OptionSpec>& option_specs() {
    static const std::vector<OptionSpec> specs{
        {"corpus", &Settings::corpus, "corpus file (CSV/TSV) or directory of .txt files"},
        {"text_column", &Settings::text_column, "column holding the passage text"},
        {"id_column", &Settings::id_column, "column holding the source id (default: row number)"},
        {"delimiter", &Settings::delimiter, "field delimiter of the corpus file; \\t for tab"},
        {"out_dir", &Settings::out_dir, "directory holding run directories"},
        {"run_id", &Settings::run_id, "run identifier (generate: new one when empty)"},
        {"mode", &Settings::mode, "one-step, two-step or copy"},
        {"targets", &Settings::targets, "comma-separated target levels, strictly increasing"},
        {"workers", &Settings::workers, "worker threads for generation and scoring"},
        {"provider", &Settings::provider, "mock or chat-http"},
        {"endpoint", &Settings::endpoint, "chat-completions URL"},
        {"model", &Settings::model, "model name sent to the endpoint"},
        {"api_key_env", &Settings::api_key_env, "environment variable holding the API key"},
        {"temperature", &Settings::temperature, "sampling temperature"},
        {"max_retries", &Settings::max_retries, "retries after a failed request"},
        {"request_timeout_ms", &Settings::request_timeout_ms, "per-request timeout in milliseconds"},
        {"max_in_flight", &Settings::max_in_flight, "concurrent requests to the endpoint"},
        {"requests_per_second", &Settings::requests_per_second, "request rate limit; 0 disables it"},
        {"system_message", &Settings::system_message, "system message; empty omits it"},
        {"seed", &Settings::seed, "mock provider seed"},
        {"prompts", &Settings::prompts, "JSON file overriding prompt instructions per level"},
        {"garbage_vowelless_min_length", &Settings::garbage_vowelless_min_length,
         "min length of a token counted as vowelless"},
        {"garbage_vowelless_fraction", &Settings::garbage_vowelless_fraction, "max share of vowelless tokens"},
        {"garbage_repeat_run", &Settings::garbage_repeat_run, "repeats of one token that mark garbage"},
        {"garbage_non_alpha_ratio", &Settings::garbage_non_alpha_ratio, "max share of non-letter characters"},
        {"garbage_min_tokens", &Settings::garbage_min_tokens, "min output tokens for long sources"},
        {"garbage_min_source_tokens", &Settings::garbage_min_source_tokens,
         "source length at which garbage_min_tokens applies"},
        {"syllables", &Settings::syllables, "word<TAB>count syllable overrides"},
        {"embeddings", &Settings::embeddings, "lexicon-file, http-service or none"},
        {"embedding_lexicon", &Settings::embedding_lexicon,
         "token<TAB>vector file for lexicon-file (empty: hashed vectors only)"},
        {"embedding_endpoint", &Settings::embedding_endpoint, "base URL of the embedding service"},
        {"embedding_model", &Settings::embedding_model, "model requested from the embedding service"},
        {"report_dir", &Settings::report_dir, "report output directory (default: <run>/report)"},
        {"bin_width", &Settings::bin_width, "source FRES bin width of the scatter series"},
        {"min_count", &Settings::min_count, "smallest bin kept in the scatter series"},
        {"charts", &Settings::charts, "also write charts/*.svg"},
        {"length_unit", &Settings::length_unit, "length-change heatmap unit: percent or words"},
    };
    return specs;
}

std::string flag_for(const std::string& key) {
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

namespace {

const OptionSpec* find_spec(const std::string& key) {
    for (const auto& s : option_specs()) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) {
        throw ConfigError(key + ": not a number: \"" + text + "\"");
    }
    return v;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": not a number: \"" + text + "\"");
}

std::vector<int> parse_levels(const std::string& key, const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        part.erase(0, part.find_first_not_of(' '));
        part.erase(part.find_last_not_of(' ') + 1);
        out.push_back(parse_number<int>(key, part));
    }
    return out;
}

}  // namespace

void apply_text(Settings& s, const OptionSpec& spec, const std::string& value) {
    std::visit(
        [&](auto member) {
            using T = std::remove_reference_t<decltype(s.*member)>;
            if constexpr (std::is_same_v<T, std::string>) {
                s.*member = value;
            } else if constexpr (std::is_same_v<T, bool>) {
                if (value == "true" || value == "1") {
                    s.*member = true;
                } else if (value == "false" || value == "0") {
                    s.*member = false;
                } else {
                    throw ConfigError(spec.key + ": expected true or false");
                }
            } else if constexpr (std::is_same_v<T, double>) {
                s.*member = parse_double(spec.key, value);
            } else if constexpr (std::is_same_v<T, std::vector<int>>) {
                s.*member = parse_levels(spec.key, value);
            } else {
                s.*member = parse_number<T>(spec.key, value);
            }
        },
        spec.field);
}

void apply_json(Settings& s, const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        const auto* spec = find_spec(key);
        if (spec == nullptr) {
            throw ConfigError("unknown config key \"" + key + "\"");
        }
        try {
            std::visit(
                [&](auto member) {
                    using T = std::remove_reference_t<decltype(s.*member)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (!value.is_number()) throw ConfigError(key + ": expected a number");
                    } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::int64_t>) {
                        if (!value.is_number_integer()) throw ConfigError(key + ": expected an integer");
                    } else if constexpr (std::is_same_v<T, bool>) {
                        if (!value.is_boolean()) throw ConfigError(key + ": expected true or false");
                    } else if constexpr (std::is_same_v<T, std::string>) {
                        if (!value.is_string()) throw ConfigError(key + ": expected a string");
                    }
                    if constexpr (std::is_same_v<T, std::vector<int>>) {
                        if (value.is_string()) {
                            s.*member = parse_levels(key, value.get<std::string>());
                            return;
                        }
                    }
                    s.*member = value.get<T>();
                },
                spec->field);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(key + ": wrong value type");
        }
    }
}

nlohmann::json to_json(const Settings& s) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& spec : option_specs()) {
        std::visit([&](auto member) { j[spec.key] = s.*member; }, spec.field);
    }
    return j;
}

void validate(const Settings& s) {
    pipeline_mode_from_string(s.mode);
    provider_kind_from_string(s.provider);
    if (s.targets.empty()) {
        throw ConfigError("targets: empty");
    }
    for (std::size_t i = 1; i < s.targets.size(); ++i) {
        if (s.targets[i] <= s.targets[i - 1]) {
            throw ConfigError("targets must be strictly increasing");
        }
    }
    if (s.workers < 1) throw ConfigError("workers must be >= 1");
    if (s.seed < 0) throw ConfigError("seed must be >= 0");
    if (s.request_timeout_ms < 1) throw ConfigError("request_timeout_ms must be >= 1");
    if (s.delimiter != "\\t" && s.delimiter.size() != 1) throw ConfigError("delimiter must be one character");
    if (s.embeddings != "none" && s.embeddings != "lexicon-file" && s.embeddings != "http-service") {
        throw ConfigError("embeddings must be lexicon-file, http-service or none");
    }
    if (s.length_unit != "percent" && s.length_unit != "words") {
        throw ConfigError("length_unit must be percent or words");
    }
    if (!(s.bin_width > 0)) throw ConfigError("bin_width must be positive");
    if (s.min_count < 1) throw ConfigError("min_count must be >= 1");
    for (auto v : {s.garbage_vowelless_min_length, s.garbage_repeat_run, s.garbage_min_tokens,
                   s.garbage_min_source_tokens}) {
        if (v < 0) throw ConfigError("garbage thresholds must be >= 0");
    }
    const auto catalog = prompt_catalog(s);
    for (int t : s.targets) {
        if (!catalog.contains(t)) {
            throw ConfigError("no prompt for target level " + std::to_string(t));
        }
    }
}

LoadOptions load_options(const Settings& s) {
    LoadOptions o;
    o.text_column = s.text_column;
    o.id_column = s.id_column;
    o.delimiter = s.delimiter == "\\t" ? '\t' : s.delimiter.front();
    return o;
}

ProviderConfig provider_config(const Settings& s) {
    ProviderConfig c;
    c.kind = provider_kind_from_string(s.provider);
    c.endpoint = s.endpoint;
    c.model_name = s.model;
    c.api_key_env = s.api_key_env;
    c.temperature = s.temperature;
    c.retry.max_retries = s.max_retries;
    c.request_timeout = std::chrono::milliseconds(s.request_timeout_ms);
    c.max_in_flight = s.max_in_flight;
    c.requests_per_second = s.requests_per_second;
    c.system_message = s.system_message;
    c.seed = static_cast<std::uint64_t>(s.seed);
    return c;
}

GarbageThresholds garbage_thresholds(const Settings& s) {
    GarbageThresholds g;
    g.vowelless_min_length = static_cast<std::size_t>(s.garbage_vowelless_min_length);
    g.vowelless_fraction = s.garbage_vowelless_fraction;
    g.repeat_run = static_cast<std::size_t>(s.garbage_repeat_run);
    g.non_alpha_ratio = s.garbage_non_alpha_ratio;
    g.min_tokens = static_cast<std::size_t>(s.garbage_min_tokens);
    g.min_source_tokens = static_cast<std::size_t>(s.garbage_min_source_tokens);
    return g;
}

ReportOptions report_options(const Settings& s) {
    ReportOptions o;
    o.bin_width = s.bin_width;
    o.min_count = static_cast<std::size_t>(s.min_count);
    o.charts = s.charts;
    o.length_unit = s.length_unit == "words" ? LengthUnit::Words : LengthUnit::Percent;
    return o;
}

PromptCatalog prompt_catalog(const Settings& s) {
    PromptCatalog catalog = PromptCatalog::standard();
    if (s.prompts.empty()) {
        return catalog;
    }
    std::ifstream in(s.prompts);
    if (!in) {
        throw ConfigError("cannot read prompts file " + s.prompts);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("prompts file " + s.prompts + ": " + e.what());
    }
    for (const auto& spec : PromptCatalog::from_json(j).specs()) {
        catalog.set(spec.target_level, spec.instruction);
    }
    return catalog;
}

std::unique_ptr<EmbeddingProvider> make_embeddings(const Settings& s) {
    if (s.embeddings == "none") {
        return nullptr;
    }
    if (s.embeddings == "lexicon-file") {
        if (s.embedding_lexicon.empty()) {
            return std::make_unique<LexiconEmbeddingProvider>();
        }
        return std::make_unique<LexiconEmbeddingProvider>(LexiconEmbeddingProvider::load(s.embedding_lexicon));
    }
    HttpEmbeddingConfig c;
    c.endpoint = s.embedding_endpoint;
    c.model = s.embedding_model;
    c.retry.max_retries = s.max_retries;
    c.request_timeout = std::chrono::milliseconds(s.request_timeout_ms);
    return std::make_unique<HttpEmbeddingProvider>(c);
}

}  // namespace readctl::cli
