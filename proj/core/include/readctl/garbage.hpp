#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace readctl {

struct GarbageThresholds {
    /// Alphabetic tokens at least this long with no vowel (a e i o u y).
    std::size_t vowelless_min_length = 4;
    /// Garbage when the share of such tokens exceeds this.
    double vowelless_fraction = 0.2;
    /// Garbage when one token repeats this many times in a row (case-insensitive).
    std::size_t repeat_run = 5;
    /// Garbage when letters are fewer than (1 - this) of non-space characters.
    double non_alpha_ratio = 0.4;
    /// Garbage when the output has fewer tokens than this ...
    std::size_t min_tokens = 3;
    /// ... and the source has at least this many.
    std::size_t min_source_tokens = 30;
};

/// Reason the output is not usable text, or nullopt. Empty output is always
/// garbage.
std::optional<std::string> garbage_reason(std::string_view text, std::string_view source_text,
                                          const GarbageThresholds& thresholds = {});

inline bool detect_garbage(std::string_view text, std::string_view source_text,
                           const GarbageThresholds& thresholds = {}) {
    return garbage_reason(text, source_text, thresholds).has_value();
}

}  // namespace readctl
