#pragma once

#include <compare>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace readctl {

struct ProviderMeta {
    std::string model;
    double latency_ms = 0.0;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    int retries = 0;

    bool operator==(const ProviderMeta&) const = default;
};

/// One generation step for a (source, target level) pair.
///
/// `fallback` means the provider output was rejected (garbage or a provider
/// failure) and `output_text` is a copy of `input_text`. For step 1 the input
/// is the source passage; for step 2 it is the kept step-1 output.
/// `is_final` marks the record whose output is the scored paraphrase.
struct GenerationRecord {
    std::string run_id;
    std::string source_id;
    int target_level = 0;
    int step = 1;
    std::string input_text;
    std::string output_text;
    bool fallback = false;
    std::string fallback_reason;
    bool is_final = false;
    ProviderMeta provider;

    bool operator==(const GenerationRecord&) const = default;
};

struct RecordKey {
    std::string run_id;
    std::string source_id;
    int target_level = 0;
    int step = 1;

    auto operator<=>(const RecordKey&) const = default;
    bool operator==(const RecordKey&) const = default;
};

inline RecordKey key_of(const GenerationRecord& r) {
    return RecordKey{r.run_id, r.source_id, r.target_level, r.step};
}

void to_json(nlohmann::json& j, const ProviderMeta& m);
void from_json(const nlohmann::json& j, ProviderMeta& m);
void to_json(nlohmann::json& j, const GenerationRecord& r);
void from_json(const nlohmann::json& j, GenerationRecord& r);

}  // namespace readctl
