#include "readctl/prompts.hpp"

#include "readctl/errors.hpp"

namespace readctl {

const PromptCatalog& PromptCatalog::standard() {
    static const PromptCatalog catalog = [] {
        PromptCatalog c;
        c.set(5, "Paraphrase this document for a professional. It should be extremely difficult to read and "
                 "best understood by university graduates.");
        c.set(20, "Paraphrase this document for college graduate level (US). It should be very difficult to "
                  "read and best understood by university graduates.");
        c.set(40, "Paraphrase this document for college level (US). It should be difficult to read.");
        c.set(55, "Paraphrase this document for 10th-12th grade school level (US). It should be fairly "
                  "difficult to read.");
        c.set(65, "Paraphrase this document for 8th/9th grade school level (US). It should be plain English "
                  "and easily understood by 13- to 15-year-old students.");
        c.set(75, "Paraphrase this document for 7th grade school level (US). It should be fairly easy to read.");
        c.set(85, "Paraphrase this document for 6th grade school level (US). It should be easy to read and "
                  "conversational English for consumers.");
        c.set(95, "Paraphrase this document for 5th grade school level (US). It should be very easy to read "
                  "and easily understood by an average 11-year old student.");
        return c;
    }();
    return catalog;
}

const std::string& PromptCatalog::instruction(int target_level) const {
    const auto it = by_level_.find(target_level);
    if (it == by_level_.end()) {
        throw UnknownLevel(target_level);
    }
    return it->second;
}

void PromptCatalog::set(int target_level, std::string instruction) {
    by_level_[target_level] = std::move(instruction);
}

std::vector<PromptSpec> PromptCatalog::specs() const {
    std::vector<PromptSpec> out;
    for (const auto& [level, text] : by_level_) {
        out.push_back({level, text});
    }
    return out;
}

nlohmann::json PromptCatalog::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& [level, text] : by_level_) {
        arr.push_back({{"target_level", level}, {"instruction", text}});
    }
    return arr;
}

PromptCatalog PromptCatalog::from_json(const nlohmann::json& j) {
    PromptCatalog c;
    try {
        if (j.is_object()) {
            for (const auto& [key, value] : j.items()) {
                std::size_t used = 0;
                const int level = std::stoi(key, &used);
                if (used != key.size()) {
                    throw ConfigError("prompt key is not a level: " + key);
                }
                c.set(level, value.get<std::string>());
            }
        } else if (j.is_array()) {
            for (const auto& item : j) {
                c.set(item.at("target_level").get<int>(), item.at("instruction").get<std::string>());
            }
        } else {
            throw ConfigError("prompts must be an object or an array");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid prompts: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("invalid prompt level: ") + e.what());
    }
    return c;
}

ChatRequest build_prompt(const PromptCatalog& catalog, int target_level, std::string_view document,
                         std::string_view system_message) {
    ChatRequest r;
    r.target_level = target_level;
    r.instruction = catalog.instruction(target_level);
    r.document = std::string(document);
    if (!system_message.empty()) {
        r.messages.push_back({"system", std::string(system_message)});
    }
    r.messages.push_back({"user", r.instruction + "\n\n" + r.document});
    return r;
}

ChatRequest build_prompt(int target_level, std::string_view document) {
    return build_prompt(PromptCatalog::standard(), target_level, document);
}

}  // namespace readctl
