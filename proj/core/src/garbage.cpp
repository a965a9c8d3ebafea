#include "readctl/garbage.hpp"

#include <algorithm>
#include <cstdio>

#include "readctl/textcore.hpp"
#include "utf8.hpp"

namespace readctl {

namespace {

bool is_letter(char32_t cp) {
    return ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || cp >= 0xC0) &&
           utf8::char_class(cp) == utf8::CharClass::Word;
}

bool vowelless_word(std::string_view lower) {
    if (!std::all_of(lower.begin(), lower.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
        return false;
    }
    return lower.find_first_of("aeiouy") == std::string_view::npos;
}

std::string fmt_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::optional<std::string> garbage_reason(std::string_view text, std::string_view source_text,
                                          const GarbageThresholds& t) {
    const auto tokens = normalized_tokens(text);
    if (tokens.empty()) {
        return "empty output";
    }

    std::size_t vowelless = 0;
    for (const auto& tok : tokens) {
        if (tok.size() >= t.vowelless_min_length && vowelless_word(tok)) {
            ++vowelless;
        }
    }
    const double vf = static_cast<double>(vowelless) / static_cast<double>(tokens.size());
    if (vf > t.vowelless_fraction) {
        return "vowelless tokens " + fmt_ratio(vf);
    }

    std::size_t run = 1;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        run = tokens[i] == tokens[i - 1] ? run + 1 : 1;
        if (run >= t.repeat_run) {
            return "token \"" + tokens[i] + "\" repeated " + std::to_string(run) + " times";
        }
    }

    std::size_t visible = 0;
    std::size_t letters = 0;
    for (std::size_t i = 0; i < text.size();) {
        const auto d = utf8::decode(text, i);
        if (!(d.codepoint < 0x80 && utf8::is_space(static_cast<char>(d.codepoint)))) {
            ++visible;
            if (is_letter(d.codepoint)) {
                ++letters;
            }
        }
        i += d.length;
    }
    const double na = visible ? 1.0 - static_cast<double>(letters) / static_cast<double>(visible) : 1.0;
    if (na > t.non_alpha_ratio) {
        return "non-alphabetic characters " + fmt_ratio(na);
    }

    if (tokens.size() < t.min_tokens && tokenize(source_text).size() >= t.min_source_tokens) {
        return "only " + std::to_string(tokens.size()) + " tokens";
    }
    return std::nullopt;
}

}  // namespace readctl
