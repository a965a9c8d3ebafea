#pragma once

// Minimal UTF-8 helpers for tokenization. Invalid sequences decode to U+FFFD
// one byte at a time, so scanning always makes progress.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace readctl::utf8 {

struct Decoded {
    char32_t codepoint;
    std::size_t length;
};

inline Decoded decode(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        return {b0, 1};
    }
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) {
            return -1;
        }
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if ((b0 & 0xE0) == 0xC0) {
        const int c1 = cont(1);
        if (c1 >= 0) {
            return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
        }
    } else if ((b0 & 0xF0) == 0xE0) {
        const int c1 = cont(1);
        const int c2 = cont(2);
        if (c1 >= 0 && c2 >= 0) {
            return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
        }
    } else if ((b0 & 0xF8) == 0xF0) {
        const int c1 = cont(1);
        const int c2 = cont(2);
        const int c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
            return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
        }
    }
    return {0xFFFD, 1};
}

enum class CharClass { Word, Apostrophe, Hyphen, Other };

inline CharClass char_class(char32_t cp) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9')) {
        return CharClass::Word;
    }
    if (cp == '\'' || cp == 0x2019 || cp == 0x02BC) {
        return CharClass::Apostrophe;
    }
    if (cp == '-' || cp == 0x2010 || cp == 0x2011) {
        return CharClass::Hyphen;
    }
    if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7 || cp == 0xFFFD || cp == 0xFEFF) {
        return CharClass::Other;
    }
    // General punctuation, symbols, CJK punctuation and fullwidth ASCII punctuation.
    if ((cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) ||
        (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF00 && cp <= 0xFF0F) ||
        (cp >= 0xFF1A && cp <= 0xFF20)) {
        return CharClass::Other;
    }
    return CharClass::Word;
}

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// U+2026 HORIZONTAL ELLIPSIS
inline bool is_ellipsis_at(std::string_view s, std::size_t i) {
    return i + 2 < s.size() && s.substr(i, 3) == "\xE2\x80\xA6";
}

// Skips closing quotes and brackets that may follow terminal punctuation.
inline std::size_t skip_closing(std::string_view s, std::size_t i) {
    while (i < s.size()) {
        const char c = s[i];
        if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') {
            ++i;
        } else if (s.substr(i, 3) == "\xE2\x80\x9D" || s.substr(i, 3) == "\xE2\x80\x99") {
            i += 3;
        } else {
            break;
        }
    }
    return i;
}

inline std::size_t skip_opening(std::string_view s, std::size_t i) {
    while (i < s.size()) {
        const char c = s[i];
        if (c == '"' || c == '\'' || c == '(' || c == '[' || c == '{') {
            ++i;
        } else if (s.substr(i, 3) == "\xE2\x80\x9C" || s.substr(i, 3) == "\xE2\x80\x98") {
            i += 3;
        } else {
            break;
        }
    }
    return i;
}

// Uppercase ASCII, Latin-1 uppercase, Greek and Cyrillic capitals.
inline bool starts_upper(std::string_view s, std::size_t i) {
    const Decoded d = decode(s, i);
    const char32_t cp = d.codepoint;
    return (cp >= 'A' && cp <= 'Z') || (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) ||
           (cp >= 0x391 && cp <= 0x3A9) || (cp >= 0x410 && cp <= 0x42F);
}

}  // namespace readctl::utf8
