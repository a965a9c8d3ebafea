#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace readctl {

/// The eight FRES target levels, ascending.
inline constexpr std::array<int, 8> kTargetLevels{5, 20, 40, 55, 65, 75, 85, 95};

/// A word token with its byte range in the analysed text.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Half-open range of token indices [first, last).
struct SentenceSpan {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t size() const noexcept { return last - first; }
    bool operator==(const SentenceSpan&) const = default;
};

/// Token / sentence / syllable decomposition of one passage and its
/// Flesch reading-ease score.
struct TextAnalysis {
    std::string text;
    std::vector<std::string> tokens;
    std::vector<SentenceSpan> sentence_spans;
    std::vector<int> syllable_counts;
    std::size_t n_words = 0;
    std::size_t n_sentences = 0;
    std::size_t n_syllables = 0;
    double fres = 0.0;
};

/// One Flesch interval. `upper` is exclusive except for the top class,
/// which also contains 100.
struct ReadabilityClass {
    int label = 0;
    double lower = 0.0;
    double upper = 0.0;
    std::string_view level;
    std::string_view description;

    bool contains(double value) const noexcept;
};

/// Word -> syllable count overrides, loaded from `word<TAB>count` lines.
/// Immutable after construction, so one instance can be shared across threads.
class SyllableLexicon {
public:
    SyllableLexicon() = default;

    static SyllableLexicon load(const std::filesystem::path& path);
    static SyllableLexicon parse(std::string_view contents);

    std::optional<int> lookup(std::string_view lowercase_word) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::unordered_map<std::string, int> entries_;
};

/// Maximal runs of letters, digits, apostrophes and internal hyphens.
/// Leading and trailing apostrophes are not part of a token.
std::vector<Token> tokenize(std::string_view text);

/// Splits after `.`, `!` or `?` when followed by whitespace and an uppercase
/// letter (optionally behind an opening quote/bracket), or by end of text.
/// Known abbreviations and single-letter initials never end a sentence.
/// Sentences without tokens are dropped.
std::vector<SentenceSpan> segment_sentences(std::string_view text, std::span<const Token> tokens);

/// Rule-based syllable count (>= 1). See core/data/SYLLABLES.md for the rules.
int count_syllables(std::string_view token, const SyllableLexicon* lexicon = nullptr);

/// 206.835 - 1.015 (words / sentences) - 84.6 (syllables / words).
double flesch_reading_ease(std::size_t words, std::size_t sentences, std::size_t syllables);

/// Full analysis of `text`. Throws EmptyText when there is no word token.
TextAnalysis fres(std::string_view text, const SyllableLexicon* lexicon = nullptr);

/// All eight classes in ascending label order.
std::span<const ReadabilityClass, 8> readability_classes();

/// The class containing `fres_value`, or std::nullopt when the value lies
/// outside [0, 100] (the out-of-range marker).
std::optional<ReadabilityClass> classify(double fres_value);

/// The class for `fres_value`, clamping out-of-range values to the nearest
/// end class.
const ReadabilityClass& classify_clamped(double fres_value);

/// Class by label. Throws UnknownLevel for labels outside kTargetLevels.
const ReadabilityClass& class_for_level(int label);

/// Lowercased tokens of `text`, as used for word error rate.
std::vector<std::string> normalized_tokens(std::string_view text);

std::string to_lower_ascii(std::string_view s);

}  // namespace readctl
