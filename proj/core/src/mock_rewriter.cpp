#include "readctl/mock_rewriter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hash.hpp"
#include "readctl/errors.hpp"
#include "utf8.hpp"

namespace readctl {

namespace detail {
extern const std::string_view kBuiltinSynonyms;
}

const SynonymLexicon& SynonymLexicon::builtin() {
    static const SynonymLexicon lex = parse(detail::kBuiltinSynonyms);
    return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot open synonym lexicon " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

SynonymLexicon SynonymLexicon::parse(std::string_view contents) {
    std::map<std::string, std::set<std::string>, std::less<>> alt;
    SynonymLexicon lex;
    std::size_t line_no = 0;
    std::istringstream in{std::string(contents)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ConfigError("synonym lexicon line " + std::to_string(line_no) + ": expected word<TAB>replacement");
        }
        const std::string a = to_lower_ascii(line.substr(0, tab));
        const std::string b = to_lower_ascii(line.substr(tab + 1));
        if (a.empty() || b.empty() || a == b) {
            continue;
        }
        alt[a].insert(b);
        alt[b].insert(a);
        ++lex.pairs_;
    }
    for (auto& [word, set] : alt) {
        lex.alternatives_.emplace(word, std::vector<std::string>(set.begin(), set.end()));
    }
    return lex;
}

const std::vector<std::string>& SynonymLexicon::alternatives(std::string_view lowercase_word) const {
    static const std::vector<std::string> none;
    const auto it = alternatives_.find(lowercase_word);
    return it == alternatives_.end() ? none : it->second;
}

namespace {

constexpr std::string_view kConjunctions[] = {"and", "but", "or", "so", "yet"};

bool is_conjunction(std::string_view lower) {
    return std::find(std::begin(kConjunctions), std::end(kConjunctions), lower) != std::end(kConjunctions);
}

constexpr std::string_view kIntensifiers[] = {
    "very", "really", "quite", "rather", "somewhat", "fairly", "just", "actually", "certainly", "definitely",
    "extremely", "particularly", "especially", "truly", "highly", "indeed",
};

// -ly words that are not adverbs
constexpr std::string_view kNotAdverbs[] = {
    "ally",  "anomaly", "apply",  "assembly", "belly",    "bully", "butterfly", "comply", "daily",
    "early", "family",  "fly",    "holy",     "hourly",   "italy", "jelly",     "july",   "lily",
    "melancholy", "monopoly", "monthly", "only", "rally", "reply", "supply", "weekly", "yearly",
};

// Adverbs and intensifiers that can be deleted without breaking the sentence.
bool is_droppable(std::string_view lower) {
    if (std::find(std::begin(kIntensifiers), std::end(kIntensifiers), lower) != std::end(kIntensifiers)) {
        return true;
    }
    return lower.size() >= 6 && lower.ends_with("ly") &&
           std::find(std::begin(kNotAdverbs), std::end(kNotAdverbs), lower) == std::end(kNotAdverbs);
}

bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_ascii_alpha(char c) { return is_ascii_upper(c) || is_ascii_lower(c); }

// A whitespace-delimited piece of the text and the whitespace before it.
struct Chunk {
    std::string ws;
    std::string text;
};

// prefix + core + suffix, where core is the word part
struct Parts {
    std::size_t core_begin = 0;
    std::size_t core_end = 0;
};

bool word_codepoint(char32_t cp) {
    return utf8::char_class(cp) == utf8::CharClass::Word;
}

Parts split_parts(std::string_view s) {
    std::size_t first = std::string_view::npos;
    std::size_t last_end = 0;
    for (std::size_t i = 0; i < s.size();) {
        const auto d = utf8::decode(s, i);
        if (word_codepoint(d.codepoint)) {
            if (first == std::string_view::npos) {
                first = i;
            }
            last_end = i + d.length;
        }
        i += d.length;
    }
    if (first == std::string_view::npos) {
        return {s.size(), s.size()};
    }
    return {first, last_end};
}

std::string_view core_of(std::string_view s) {
    const Parts p = split_parts(s);
    return s.substr(p.core_begin, p.core_end - p.core_begin);
}

std::string_view suffix_of(std::string_view s) {
    return s.substr(split_parts(s).core_end);
}

// Copies the capitalisation pattern of `like` onto `word`.
std::string match_case(std::string_view like, std::string word) {
    if (like.empty() || word.empty() || !is_ascii_upper(like.front())) {
        return word;
    }
    const bool all_upper = like.size() > 1 && std::none_of(like.begin(), like.end(), is_ascii_lower);
    if (all_upper) {
        for (auto& c : word) {
            if (is_ascii_lower(c)) {
                c = static_cast<char>(c - 'a' + 'A');
            }
        }
    } else if (is_ascii_lower(word.front())) {
        word.front() = static_cast<char>(word.front() - 'a' + 'A');
    }
    return word;
}

// Capitalises the first letter of the core. False when it does not start
// with an ASCII letter.
bool capitalize(std::string& chunk) {
    const Parts p = split_parts(chunk);
    if (p.core_begin >= chunk.size() || !is_ascii_alpha(chunk[p.core_begin])) {
        return false;
    }
    if (is_ascii_lower(chunk[p.core_begin])) {
        chunk[p.core_begin] = static_cast<char>(chunk[p.core_begin] - 'a' + 'A');
    }
    return true;
}

// Lowercases a sentence-initial word unless it looks like "I", an acronym or
// a camel-case name.
void decapitalize(std::string& chunk) {
    const Parts p = split_parts(chunk);
    const std::string_view core = std::string_view(chunk).substr(p.core_begin, p.core_end - p.core_begin);
    if (core.empty() || !is_ascii_upper(core.front())) {
        return;
    }
    if (core == "I" || core.starts_with("I'")) {
        return;
    }
    if (std::any_of(core.begin() + 1, core.end(), is_ascii_upper)) {
        return;
    }
    chunk[p.core_begin] = static_cast<char>(core.front() - 'A' + 'a');
}

struct Layout {
    std::string text;
    TextAnalysis analysis;
    std::vector<std::size_t> tokens;                   // word tokens per chunk
    std::vector<std::ptrdiff_t> sentence;              // sentence of each chunk, -1 before the first token
    std::vector<std::size_t> sentence_tokens;          // tokens per sentence
};

std::string render(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        out += c.ws;
        out += c.text;
    }
    return out;
}

Layout lay_out(const std::vector<Chunk>& chunks, const SyllableLexicon* syllables) {
    Layout l;
    l.text = render(chunks);
    l.analysis = fres(l.text, syllables);
    const auto toks = tokenize(l.text);
    const auto spans = segment_sentences(l.text, toks);
    std::vector<std::size_t> tok_sentence(toks.size());
    for (std::size_t s = 0; s < spans.size(); ++s) {
        for (std::size_t t = spans[s].first; t < spans[s].last; ++t) {
            tok_sentence[t] = s;
        }
        l.sentence_tokens.push_back(spans[s].size());
    }
    l.tokens.assign(chunks.size(), 0);
    l.sentence.assign(chunks.size(), -1);
    std::size_t pos = 0;
    std::size_t t = 0;
    std::ptrdiff_t current = -1;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        pos += chunks[i].ws.size();
        const std::size_t end = pos + chunks[i].text.size();
        bool first = true;
        while (t < toks.size() && toks[t].begin < end) {
            if (first) {
                current = static_cast<std::ptrdiff_t>(tok_sentence[t]);
                first = false;
            }
            ++l.tokens[i];
            ++t;
        }
        l.sentence[i] = current;
        pos = end;
    }
    return l;
}

std::vector<Chunk> chunk_text(std::string_view text) {
    std::vector<Chunk> chunks;
    std::size_t i = 0;
    std::string trailing;
    while (i < text.size()) {
        const std::size_t ws_begin = i;
        while (i < text.size() && utf8::is_space(text[i])) {
            ++i;
        }
        const std::size_t word_begin = i;
        while (i < text.size() && !utf8::is_space(text[i])) {
            ++i;
        }
        if (word_begin == i) {
            trailing = std::string(text.substr(ws_begin, i - ws_begin));
            break;
        }
        chunks.push_back({std::string(text.substr(ws_begin, word_begin - ws_begin)),
                          std::string(text.substr(word_begin, i - word_begin))});
    }
    if (!trailing.empty()) {
        chunks.push_back({trailing, ""});
    }
    return chunks;
}

enum class Kind { Swap, SwapAll, SplitPunct, SplitConj, Merge, Drop };

struct Candidate {
    Kind kind = Kind::Swap;
    std::size_t chunk = 0;    // Swap, splits: the chunk; Merge: last chunk of the first sentence
    std::size_t next = 0;     // Merge: first chunk of the second sentence
    std::string word;         // SwapAll: lowercase word replaced
    std::string replacement;  // swaps
    std::size_t occurrences = 0;  // SwapAll
    long dw = 0;
    long ds = 0;
    long dy = 0;
    std::string key;
};

int syllables_of(std::string_view word, const SyllableLexicon* lex) {
    return count_syllables(word, lex);
}

// Index of the chunk after `i` that carries a token, or npos.
std::size_t next_word_chunk(const Layout& l, std::size_t i) {
    for (std::size_t j = i + 1; j < l.tokens.size(); ++j) {
        if (l.tokens[j] > 0) {
            return j;
        }
    }
    return std::string::npos;
}

// Tokens in the sentence of chunk i, before and after it (exclusive).
std::pair<std::size_t, std::size_t> tokens_around(const Layout& l, std::size_t i) {
    std::size_t before = 0;
    std::size_t after = 0;
    for (std::size_t j = 0; j < l.tokens.size(); ++j) {
        if (l.sentence[j] != l.sentence[i]) {
            continue;
        }
        if (j < i) {
            before += l.tokens[j];
        } else if (j > i) {
            after += l.tokens[j];
        }
    }
    return {before, after};
}

bool ends_with_terminal(std::string_view chunk, std::size_t& terminal_begin, std::size_t& terminal_end) {
    // strip closing quotes and brackets
    std::size_t end = chunk.size();
    while (end > 0) {
        const char c = chunk[end - 1];
        if (c == '"' || c == '\'' || c == ')' || c == ']') {
            --end;
        } else if (end >= 3 && (chunk.substr(end - 3, 3) == "\xE2\x80\x9D" || chunk.substr(end - 3, 3) == "\xE2\x80\x99")) {
            end -= 3;
        } else {
            break;
        }
    }
    std::size_t begin = end;
    while (begin > 0 && (chunk[begin - 1] == '.' || chunk[begin - 1] == '!' || chunk[begin - 1] == '?')) {
        --begin;
    }
    if (begin == end) {
        return false;
    }
    terminal_begin = begin;
    terminal_end = end;
    return true;
}

std::vector<Candidate> candidates(const std::vector<Chunk>& chunks, const Layout& l, const SynonymLexicon& syn,
                                  const SyllableLexicon* lex) {
    std::vector<Candidate> out;
    std::map<std::pair<std::string, std::string>, Candidate> all;

    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (l.tokens[i] != 1) {
            continue;
        }
        const std::string_view text = chunks[i].text;
        const std::string_view core = core_of(text);
        const std::string lower = to_lower_ascii(core);

        for (const auto& alt : syn.alternatives(lower)) {
            const long dy = syllables_of(alt, lex) - syllables_of(lower, lex);
            if (dy == 0) {
                continue;
            }
            Candidate c;
            c.kind = Kind::Swap;
            c.chunk = i;
            c.replacement = alt;
            c.dy = dy;
            c.key = "swap " + std::to_string(i) + " " + lower + "->" + alt;
            out.push_back(c);

            auto& agg = all[{lower, alt}];
            if (agg.key.empty()) {
                agg.kind = Kind::SwapAll;
                agg.word = lower;
                agg.replacement = alt;
                agg.key = "swap-all " + lower + "->" + alt;
            }
            agg.dy += dy;
            ++agg.occurrences;
        }

        const std::size_t next = next_word_chunk(l, i);
        const bool same_sentence = next != std::string::npos && l.sentence[next] == l.sentence[i];
        const auto [before, after] = tokens_around(l, i);

        // split after a comma, semicolon or colon
        const std::string_view suffix = suffix_of(text);
        if (same_sentence && (suffix == "," || suffix == ";" || suffix == ":") && before + 1 >= 3 && after >= 3) {
            const std::string next_lower = to_lower_ascii(core_of(chunks[next].text));
            const bool drop = is_conjunction(next_lower) && chunks[next].text == core_of(chunks[next].text) &&
                              after - 1 >= 3;
            Candidate c;
            c.kind = Kind::SplitPunct;
            c.chunk = i;
            c.ds = 1;
            if (drop) {
                c.dw = -1;
                c.dy = -syllables_of(next_lower, lex);
            }
            c.key = "split " + std::to_string(i);
            out.push_back(c);
        }

        // split at a bare conjunction
        if (i > 0 && same_sentence && is_conjunction(lower) && text == core && before >= 3 && after >= 3 &&
            l.tokens[i - 1] > 0 && l.sentence[i - 1] == l.sentence[i] && suffix_of(chunks[i - 1].text).empty()) {
            Candidate c;
            c.kind = Kind::SplitConj;
            c.chunk = i;
            c.ds = 1;
            c.dw = -1;
            c.dy = -syllables_of(lower, lex);
            c.key = "split-conj " + std::to_string(i);
            out.push_back(c);
        }

        // drop an adverb inside a sentence
        if (same_sentence && text == core && before >= 1 && is_droppable(lower)) {
            Candidate c;
            c.kind = Kind::Drop;
            c.chunk = i;
            c.dw = -1;
            c.dy = -syllables_of(lower, lex);
            c.key = "drop " + std::to_string(i);
            out.push_back(c);
        }

        // merge with the following sentence
        std::size_t tb = 0;
        std::size_t te = 0;
        if (next != std::string::npos && l.sentence[next] == l.sentence[i] + 1 && ends_with_terminal(text, tb, te)) {
            bool last_of_sentence = true;
            for (std::size_t j = i + 1; j < next; ++j) {
                last_of_sentence = last_of_sentence && l.tokens[j] == 0;
            }
            if (last_of_sentence) {
                const std::string next_lower = to_lower_ascii(core_of(chunks[next].text));
                Candidate c;
                c.kind = Kind::Merge;
                c.chunk = i;
                c.next = next;
                c.ds = -1;
                if (!is_conjunction(next_lower)) {
                    c.dw = 1;
                    c.dy = syllables_of("and", lex);
                }
                c.key = "merge " + std::to_string(i);
                out.push_back(c);
            }
        }
    }
    for (auto& [k, c] : all) {
        if (c.occurrences >= 2) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::string with_core(std::string_view chunk, const std::string& word) {
    const Parts p = split_parts(chunk);
    const std::string_view core = chunk.substr(p.core_begin, p.core_end - p.core_begin);
    return std::string(chunk.substr(0, p.core_begin)) + match_case(core, word) + std::string(chunk.substr(p.core_end));
}

void apply(std::vector<Chunk>& chunks, const Layout& l, const Candidate& c) {
    switch (c.kind) {
        case Kind::Swap:
            chunks[c.chunk].text = with_core(chunks[c.chunk].text, c.replacement);
            break;
        case Kind::SwapAll:
            for (std::size_t i = 0; i < chunks.size(); ++i) {
                if (l.tokens[i] == 1 && to_lower_ascii(core_of(chunks[i].text)) == c.word) {
                    chunks[i].text = with_core(chunks[i].text, c.replacement);
                }
            }
            break;
        case Kind::SplitPunct: {
            auto& text = chunks[c.chunk].text;
            text.back() = '.';
            std::size_t next = next_word_chunk(l, c.chunk);
            if (c.dw < 0) {
                chunks.erase(chunks.begin() + static_cast<std::ptrdiff_t>(next));
            }
            capitalize(chunks[next].text);
            break;
        }
        case Kind::SplitConj: {
            chunks[c.chunk - 1].text += '.';
            chunks.erase(chunks.begin() + static_cast<std::ptrdiff_t>(c.chunk));
            capitalize(chunks[c.chunk].text);
            break;
        }
        case Kind::Drop:
            chunks.erase(chunks.begin() + static_cast<std::ptrdiff_t>(c.chunk));
            break;
        case Kind::Merge: {
            auto& text = chunks[c.chunk].text;
            std::size_t tb = 0;
            std::size_t te = 0;
            ends_with_terminal(text, tb, te);
            text.replace(tb, te - tb, ",");
            auto& next = chunks[c.next];
            decapitalize(next.text);
            if (next.ws.find('\n') != std::string::npos) {
                next.ws = " ";
            }
            if (c.dw > 0) {
                chunks.insert(chunks.begin() + static_cast<std::ptrdiff_t>(c.next), Chunk{" ", "and"});
            }
            break;
        }
    }
}

double predicted(const TextAnalysis& a, const Candidate& c) {
    const long w = static_cast<long>(a.n_words) + c.dw;
    const long s = static_cast<long>(a.n_sentences) + c.ds;
    const long y = static_cast<long>(a.n_syllables) + c.dy;
    if (w <= 0 || s <= 0 || y <= 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return flesch_reading_ease(static_cast<std::size_t>(w), static_cast<std::size_t>(s),
                               static_cast<std::size_t>(y));
}

std::uint64_t tie_break(std::uint64_t seed, const std::string& key) {
    std::uint64_t state = seed ^ detail::fnv1a64(key);
    return detail::splitmix64(state);
}

}  // namespace

MockRewriteResult mock_rewrite(std::string_view source, int target_level, std::uint64_t seed,
                               const MockRewriteOptions& options) {
    const SynonymLexicon& syn = options.synonyms ? *options.synonyms : SynonymLexicon::builtin();
    const SyllableLexicon* lex = options.syllables;
    const double target = static_cast<double>(target_level);

    MockRewriteResult result;
    std::vector<Chunk> chunks = chunk_text(source);
    Layout layout = lay_out(chunks, lex);
    result.initial_fres = layout.analysis.fres;
    result.final_fres = layout.analysis.fres;
    result.text = std::string(source);

    std::set<std::string> rejected;
    int attempts = 0;
    const int max_attempts = options.max_iterations * 20 + 100;
    while (result.iterations < options.max_iterations && attempts < max_attempts) {
        const double current = std::abs(layout.analysis.fres - target);
        if (current <= options.tolerance) {
            break;
        }
        const Candidate* best = nullptr;
        double best_gap = current;
        std::uint64_t best_tie = 0;
        const auto cands = candidates(chunks, layout, syn, lex);
        for (const auto& c : cands) {
            if (rejected.count(c.key)) {
                continue;
            }
            const double p = predicted(layout.analysis, c);
            if (std::isnan(p)) {
                continue;
            }
            const double gap = std::abs(p - target);
            if (gap >= current) {
                continue;
            }
            const std::uint64_t tie = tie_break(seed, c.key);
            if (!best || gap < best_gap || (gap == best_gap && tie < best_tie)) {
                best = &c;
                best_gap = gap;
                best_tie = tie;
            }
        }
        if (!best) {
            break;
        }
        ++attempts;
        std::vector<Chunk> edited = chunks;
        apply(edited, layout, *best);
        Layout next;
        try {
            next = lay_out(edited, lex);
        } catch (const EmptyText&) {
            rejected.insert(best->key);
            continue;
        }
        if (std::abs(next.analysis.fres - target) < current) {
            result.trace.push_back({best->key, next.analysis.fres});
            chunks = std::move(edited);
            layout = std::move(next);
            rejected.clear();
            ++result.iterations;
        } else {
            rejected.insert(best->key);
        }
    }
    if (result.iterations > 0) {
        result.text = layout.text;
        result.final_fres = layout.analysis.fres;
    }
    return result;
}

}  // namespace readctl
