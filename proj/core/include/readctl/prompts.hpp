#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace readctl {

struct PromptSpec {
    int target_level = 0;
    std::string instruction;

    bool operator==(const PromptSpec&) const = default;
};

/// Instruction text per target level. The default catalog holds the eight
/// standard instructions; entries can be overridden or added from config.
class PromptCatalog {
public:
    static const PromptCatalog& standard();

    /// Throws UnknownLevel.
    const std::string& instruction(int target_level) const;
    bool contains(int target_level) const { return by_level_.count(target_level) != 0; }
    void set(int target_level, std::string instruction);

    /// Ascending by level.
    std::vector<PromptSpec> specs() const;

    nlohmann::json to_json() const;
    /// Accepts {"5": "...", ...} or [{"target_level": 5, "instruction": "..."}].
    static PromptCatalog from_json(const nlohmann::json& j);

    bool operator==(const PromptCatalog&) const = default;

private:
    std::map<int, std::string> by_level_;
};

inline constexpr std::string_view kDefaultSystemMessage = "You are a helpful assistant.";

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    int target_level = 0;
    std::string instruction;
    std::string document;
    std::vector<ChatMessage> messages;
};

/// System message (when non-empty) followed by one user message holding the
/// instruction, a blank line and the document. Throws UnknownLevel.
ChatRequest build_prompt(const PromptCatalog& catalog, int target_level, std::string_view document,
                         std::string_view system_message = kDefaultSystemMessage);
ChatRequest build_prompt(int target_level, std::string_view document);

}  // namespace readctl
