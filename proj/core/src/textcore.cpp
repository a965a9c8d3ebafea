#include "readctl/textcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "readctl/errors.hpp"
#include "utf8.hpp"

namespace readctl {

namespace {

constexpr std::array<ReadabilityClass, 8> kClasses{{
    {5, 0.0, 10.0, "Professional",
     "Extremely difficult to read. Best understood by university graduates."},
    {20, 10.0, 30.0, "College graduate",
     "Very difficult to read. Best understood by university graduates."},
    {40, 30.0, 50.0, "College", "Difficult to read."},
    {55, 50.0, 60.0, "10-12th grade", "Fairly difficult to read."},
    {65, 60.0, 70.0, "8-9th grade",
     "Plain English. Easily understood by 13- to 15-year-old students."},
    {75, 70.0, 80.0, "7th grade", "Fairly easy to read."},
    {85, 80.0, 90.0, "6th grade", "Easy to read. Conversational English for consumers."},
    {95, 90.0, 100.0, "5th grade",
     "Very easy to read. Easily understood by an average 11-year-old student."},
}};

// Abbreviations whose trailing period never ends a sentence.
constexpr std::string_view kAbbreviations[] = {
    "al.",    "apr.",  "approx.", "aug.", "ave.",  "blvd.", "capt.", "cf.",   "co.",
    "col.",   "corp.", "dec.",    "dept.", "dr.",  "e.g.",  "etc.",  "feb.",  "fig.",
    "ft.",    "gen.",  "hon.",    "i.e.", "inc.",  "jan.",  "jr.",   "jul.",  "jun.",
    "lt.",    "ltd.",  "mar.",    "mr.",  "mrs.",  "ms.",   "mt.",   "nov.",  "oct.",
    "prof.",  "rev.",  "sep.",    "sept.", "sgt.", "sr.",  "st.",  "vs.",
};

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_abbreviation(std::string_view chunk) {
    if (std::find(std::begin(kAbbreviations), std::end(kAbbreviations), chunk) !=
        std::end(kAbbreviations)) {
        return true;
    }
    // Initials and dotted acronyms: "j.", "u.s.", "a.m."
    if (chunk.size() < 2 || chunk.size() % 2 != 0) {
        return false;
    }
    for (std::size_t i = 0; i < chunk.size(); i += 2) {
        if (!(chunk[i] >= 'a' && chunk[i] <= 'z') || chunk[i + 1] != '.') {
            return false;
        }
    }
    return true;
}

bool is_vowel(std::string_view w, std::size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return true;
        case 'y':
            return i != 0;
        default:
            return false;
    }
}

bool is_aeiou(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool contains(std::string_view w, std::string_view pat) { return w.find(pat) != std::string_view::npos; }

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

// Add-one patterns, each counted once when present.
int pattern_additions(std::string_view w) {
    int n = 0;
    for (std::string_view p : {"ia", "riet", "dien", "iu", "io", "ii"}) {
        n += contains(w, p);
    }
    for (std::size_t i = 0; i + 2 < w.size(); ++i) {
        if (is_aeiou(w[i]) && is_aeiou(w[i + 1]) && is_aeiou(w[i + 2])) {
            ++n;
            break;
        }
    }
    n += w.starts_with("mc");
    n += ends_with(w, "ism");
    for (std::size_t pos = w.find("llien"); pos != std::string_view::npos; pos = w.find("llien", pos + 1)) {
        if (pos > 0 && w[pos - 1] != 'l') {
            ++n;
            break;
        }
    }
    if (w.size() >= 5 && w.starts_with("coa") &&
        (w[3] == 'd' || w[3] == 'g' || w[3] == 'l' || w[3] == 'x')) {
        ++n;
    }
    for (std::size_t i = 1; i + 2 < w.size(); ++i) {
        if (w[i] == 'u' && w[i + 1] == 'a' && w[i - 1] != 'g' && w[i - 1] != 'q' &&
            !is_aeiou(w[i + 2])) {
            ++n;
            break;
        }
    }
    n += ends_with(w, "dnt");
    return n;
}

// Subtract-one patterns, each counted once when present.
int pattern_subtractions(std::string_view w) {
    int n = 0;
    for (std::string_view p : {"cial", "tia", "cius", "cious", "gui", "ion", "iou"}) {
        n += contains(w, p);
    }
    n += ends_with(w, "sia");
    n += (w.size() >= 4 && ends_with(w, "ely"));
    return n;
}

int count_letter_run(std::string_view word) {
    std::string_view w = word;
    const bool consonant_le = w.size() > 2 && ends_with(w, "le") && !is_vowel(w, w.size() - 3);
    if (!consonant_le && !w.empty() && w.back() == 'e') {
        w.remove_suffix(1);
    }
    int groups = 0;
    bool previous = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const bool v = is_vowel(w, i);
        if (v && !previous) {
            ++groups;
        }
        previous = v;
    }
    const int n = groups + pattern_additions(w) - pattern_subtractions(w);
    return std::max(1, n);
}

// Counts one hyphen-free, apostrophe-free part: digits are one syllable each,
// letter runs go through the rules.
int count_part(std::string_view part) {
    int total = 0;
    std::size_t i = 0;
    while (i < part.size()) {
        if (part[i] >= '0' && part[i] <= '9') {
            ++total;
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < part.size() && !(part[j] >= '0' && part[j] <= '9')) {
            ++j;
        }
        total += count_letter_run(part.substr(i, j - i));
        i = j;
    }
    return std::max(1, total);
}

}  // namespace

bool ReadabilityClass::contains(double value) const noexcept {
    if (value >= lower && value < upper) {
        return true;
    }
    return label == 95 && value == 100.0;
}

SyllableLexicon SyllableLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open syllable lexicon " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

SyllableLexicon SyllableLexicon::parse(std::string_view contents) {
    SyllableLexicon lexicon;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < contents.size()) {
        std::size_t eol = contents.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = contents.size();
        }
        std::string_view line = contents.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw Error("syllable lexicon line " + std::to_string(line_no) + ": expected word<TAB>count");
        }
        const std::string count_text(line.substr(tab + 1));
        int count = 0;
        try {
            count = std::stoi(count_text);
        } catch (const std::exception&) {
            count = 0;
        }
        if (count < 1) {
            throw Error("syllable lexicon line " + std::to_string(line_no) + ": count must be a positive integer");
        }
        lexicon.entries_[to_lower_ascii(line.substr(0, tab))] = count;
    }
    return lexicon;
}

std::optional<int> SyllableLexicon::lookup(std::string_view lowercase_word) const {
    if (const auto it = entries_.find(std::string(lowercase_word)); it != entries_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const utf8::Decoded here = utf8::decode(text, i);
        if (utf8::char_class(here.codepoint) != utf8::CharClass::Word) {
            i += here.length;
            continue;
        }
        const std::size_t begin = i;
        std::string token;
        std::size_t end = i;
        std::size_t token_end = i;  // byte end excluding trailing apostrophes
        std::size_t committed = 0;  // token length excluding trailing apostrophes
        while (end < text.size()) {
            const utf8::Decoded d = utf8::decode(text, end);
            const utf8::CharClass cls = utf8::char_class(d.codepoint);
            if (cls == utf8::CharClass::Word) {
                token.append(text.substr(end, d.length));
                end += d.length;
                token_end = end;
                committed = token.size();
            } else if (cls == utf8::CharClass::Apostrophe) {
                token.push_back('\'');
                end += d.length;
            } else if (cls == utf8::CharClass::Hyphen && end + d.length < text.size()) {
                const utf8::Decoded next = utf8::decode(text, end + d.length);
                if (utf8::char_class(next.codepoint) != utf8::CharClass::Word || token.empty() ||
                    token.back() == '\'') {
                    break;
                }
                token.push_back('-');
                end += d.length;
            } else {
                break;
            }
        }
        token.resize(committed);
        tokens.push_back(Token{std::move(token), begin, token_end});
        i = end;
    }
    return tokens;
}

std::vector<SentenceSpan> segment_sentences(std::string_view text, std::span<const Token> tokens) {
    std::vector<std::size_t> boundaries;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const bool ellipsis = utf8::is_ellipsis_at(text, i);
        if (!is_terminal(text[i]) && !ellipsis) {
            ++i;
            continue;
        }
        std::size_t j = i;  // last byte of the terminal run
        if (ellipsis) {
            j = i + 2;
        }
        for (;;) {
            if (j + 1 < n && is_terminal(text[j + 1])) {
                ++j;
            } else if (utf8::is_ellipsis_at(text, j + 1)) {
                j += 3;
            } else {
                break;
            }
        }
        const bool single_period = (j == i && text[i] == '.');
        std::size_t k = utf8::skip_closing(text, j + 1);
        const std::size_t end = k;
        std::size_t after_space = k;
        while (after_space < n && utf8::is_space(text[after_space])) {
            ++after_space;
        }
        if (after_space >= n) {
            boundaries.push_back(end);
        } else if (after_space > k) {
            const std::size_t start = utf8::skip_opening(text, after_space);
            if (start < n && utf8::starts_upper(text, start)) {
                bool suppress = false;
                if (single_period) {
                    std::size_t s = i;
                    while (s > 0 && !utf8::is_space(text[s - 1])) {
                        --s;
                    }
                    s = utf8::skip_opening(text, s);
                    suppress = is_abbreviation(to_lower_ascii(text.substr(s, i + 1 - s)));
                }
                if (!suppress) {
                    boundaries.push_back(end);
                }
            }
        }
        i = j + 1;
    }

    std::vector<SentenceSpan> spans;
    std::size_t t = 0;
    auto close_until = [&](std::size_t limit) {
        const std::size_t first = t;
        while (t < tokens.size() && tokens[t].begin < limit) {
            ++t;
        }
        if (t > first) {
            spans.push_back({first, t});
        }
    };
    for (std::size_t b : boundaries) {
        close_until(b);
    }
    close_until(std::string_view::npos);
    return spans;
}

int count_syllables(std::string_view token, const SyllableLexicon* lexicon) {
    std::string word = to_lower_ascii(token);
    if (lexicon != nullptr) {
        if (auto hit = lexicon->lookup(word)) {
            return *hit;
        }
    }
    std::erase(word, '\'');
    int total = 0;
    int parts = 0;
    std::size_t pos = 0;
    while (pos <= word.size()) {
        std::size_t dash = word.find('-', pos);
        if (dash == std::string::npos) {
            dash = word.size();
        }
        if (dash > pos) {
            total += count_part(std::string_view(word).substr(pos, dash - pos));
            ++parts;
        }
        pos = dash + 1;
    }
    return parts == 0 ? 1 : total;
}

double flesch_reading_ease(std::size_t words, std::size_t sentences, std::size_t syllables) {
    const double w = static_cast<double>(words);
    return 206.835 - 1.015 * (w / static_cast<double>(sentences)) -
           84.6 * (static_cast<double>(syllables) / w);
}

TextAnalysis fres(std::string_view text, const SyllableLexicon* lexicon) {
    const std::vector<Token> tokens = tokenize(text);
    if (tokens.empty()) {
        throw EmptyText();
    }
    TextAnalysis a;
    a.text = std::string(text);
    a.sentence_spans = segment_sentences(text, tokens);
    a.tokens.reserve(tokens.size());
    a.syllable_counts.reserve(tokens.size());
    for (const Token& t : tokens) {
        const int s = count_syllables(t.text, lexicon);
        a.syllable_counts.push_back(s);
        a.n_syllables += static_cast<std::size_t>(s);
        a.tokens.push_back(t.text);
    }
    a.n_words = a.tokens.size();
    a.n_sentences = a.sentence_spans.size();
    a.fres = flesch_reading_ease(a.n_words, a.n_sentences, a.n_syllables);
    return a;
}

std::span<const ReadabilityClass, 8> readability_classes() { return kClasses; }

std::optional<ReadabilityClass> classify(double fres_value) {
    for (const ReadabilityClass& c : kClasses) {
        if (c.contains(fres_value)) {
            return c;
        }
    }
    return std::nullopt;
}

const ReadabilityClass& classify_clamped(double fres_value) {
    if (std::isnan(fres_value) || fres_value < 0.0) {
        return kClasses.front();
    }
    if (fres_value >= 100.0) {
        return kClasses.back();
    }
    for (const ReadabilityClass& c : kClasses) {
        if (c.contains(fres_value)) {
            return c;
        }
    }
    return kClasses.back();
}

const ReadabilityClass& class_for_level(int label) {
    for (const ReadabilityClass& c : kClasses) {
        if (c.label == label) {
            return c;
        }
    }
    throw UnknownLevel(label);
}

std::vector<std::string> normalized_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (Token& t : tokenize(text)) {
        out.push_back(to_lower_ascii(t.text));
    }
    return out;
}

}  // namespace readctl
