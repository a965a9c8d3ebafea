#include "readctl/records.hpp"

namespace readctl {

void to_json(nlohmann::json& j, const ProviderMeta& m) {
    j = nlohmann::json{{"model", m.model}, {"latency_ms", m.latency_ms}, {"retries", m.retries}};
    if (m.prompt_tokens) {
        j["prompt_tokens"] = *m.prompt_tokens;
    }
    if (m.completion_tokens) {
        j["completion_tokens"] = *m.completion_tokens;
    }
}

void from_json(const nlohmann::json& j, ProviderMeta& m) {
    m.model = j.value("model", std::string{});
    m.latency_ms = j.value("latency_ms", 0.0);
    m.retries = j.value("retries", 0);
    m.prompt_tokens.reset();
    m.completion_tokens.reset();
    if (j.contains("prompt_tokens")) {
        m.prompt_tokens = j.at("prompt_tokens").get<int>();
    }
    if (j.contains("completion_tokens")) {
        m.completion_tokens = j.at("completion_tokens").get<int>();
    }
}

void to_json(nlohmann::json& j, const GenerationRecord& r) {
    j = nlohmann::json::object();
    j["run_id"] = r.run_id;
    j["source_id"] = r.source_id;
    j["target_level"] = r.target_level;
    j["step"] = r.step;
    j["final"] = r.is_final;
    j["fallback"] = r.fallback;
    j["fallback_reason"] = r.fallback_reason;
    j["input_text"] = r.input_text;
    j["output_text"] = r.output_text;
    j["provider"] = r.provider;
}

void from_json(const nlohmann::json& j, GenerationRecord& r) {
    j.at("run_id").get_to(r.run_id);
    j.at("source_id").get_to(r.source_id);
    j.at("target_level").get_to(r.target_level);
    j.at("step").get_to(r.step);
    r.is_final = j.value("final", false);
    r.fallback = j.value("fallback", false);
    r.fallback_reason = j.value("fallback_reason", std::string{});
    j.at("input_text").get_to(r.input_text);
    j.at("output_text").get_to(r.output_text);
    r.provider = j.contains("provider") ? j.at("provider").get<ProviderMeta>() : ProviderMeta{};
}

}  // namespace readctl
