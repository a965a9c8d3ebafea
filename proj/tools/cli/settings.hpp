#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "readctl/dataset.hpp"
#include "readctl/embeddings.hpp"
#include "readctl/garbage.hpp"
#include "readctl/pipeline.hpp"
#include "readctl/prompts.hpp"
#include "readctl/provider.hpp"
#include "readctl/report.hpp"

namespace readctl::cli {

// Every config-file key, all flat. The flag for key `foo_bar` is `--foo-bar`.
struct Settings {
    std::string corpus;
    std::string text_column = "text";
    std::string id_column;
    std::string delimiter = ",";

    std::string out_dir = "runs";
    std::string run_id;
    std::string mode = "one-step";
    std::vector<int> targets{kTargetLevels.begin(), kTargetLevels.end()};
    int workers = 4;

    std::string provider = "mock";
    std::string endpoint;
    std::string model;
    std::string api_key_env;
    double temperature = 1.0;
    int max_retries = 3;
    int request_timeout_ms = 60'000;
    int max_in_flight = 4;
    double requests_per_second = 0.0;
    std::string system_message{kDefaultSystemMessage};
    std::int64_t seed = 0;
    std::string prompts;

    std::int64_t garbage_vowelless_min_length = 4;
    double garbage_vowelless_fraction = 0.2;
    std::int64_t garbage_repeat_run = 5;
    double garbage_non_alpha_ratio = 0.4;
    std::int64_t garbage_min_tokens = 3;
    std::int64_t garbage_min_source_tokens = 30;

    std::string syllables;

    std::string embeddings = "none";
    std::string embedding_lexicon;
    std::string embedding_endpoint;
    std::string embedding_model;

    std::string report_dir;
    double bin_width = 5.0;
    int min_count = 10;
    bool charts = false;
    std::string length_unit = "percent";
};

using Field = std::variant<std::string Settings::*, int Settings::*, std::int64_t Settings::*, double Settings::*,
                           bool Settings::*, std::vector<int> Settings::*>;

struct OptionSpec {
    std::string key;
    Field field;
    std::string help;
};

const std::vector<OptionSpec>& option_specs();

/// "foo_bar" -> "--foo-bar".
std::string flag_for(const std::string& key);

/// Applies a config object. Throws ConfigError on an unknown key or a value
/// of the wrong type.
void apply_json(Settings& s, const nlohmann::json& j);
/// Applies a flag value given as text. Throws ConfigError.
void apply_text(Settings& s, const OptionSpec& spec, const std::string& value);

nlohmann::json to_json(const Settings& s);

/// Throws ConfigError on inconsistent values.
void validate(const Settings& s);

LoadOptions load_options(const Settings& s);
ProviderConfig provider_config(const Settings& s);
GarbageThresholds garbage_thresholds(const Settings& s);
ReportOptions report_options(const Settings& s);
/// Standard catalog with the levels from `prompts` overridden.
PromptCatalog prompt_catalog(const Settings& s);
/// nullptr for "none".
std::unique_ptr<EmbeddingProvider> make_embeddings(const Settings& s);

}  // namespace readctl::cli
