#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "readctl/textcore.hpp"

namespace readctl {

/// Word pairs that differ in syllable count. Pairs are used in both
/// directions: `use<TAB>utilize` lets either word replace the other.
class SynonymLexicon {
public:
    /// The lexicon compiled from core/data/synonyms.tsv.
    static const SynonymLexicon& builtin();
    /// Throws StorageError.
    static SynonymLexicon load(const std::filesystem::path& path);
    /// Throws ConfigError on a line without a tab.
    static SynonymLexicon parse(std::string_view contents);

    /// Sorted alternatives for a lowercase word, empty when unknown.
    const std::vector<std::string>& alternatives(std::string_view lowercase_word) const;
    std::size_t pair_count() const noexcept { return pairs_; }

private:
    std::map<std::string, std::vector<std::string>, std::less<>> alternatives_;
    std::size_t pairs_ = 0;
};

struct MockRewriteOptions {
    /// Defaults to SynonymLexicon::builtin().
    const SynonymLexicon* synonyms = nullptr;
    const SyllableLexicon* syllables = nullptr;
    double tolerance = 4.0;
    int max_iterations = 50;
};

struct RewriteStep {
    std::string edit;
    double fres = 0.0;
};

struct MockRewriteResult {
    std::string text;
    double initial_fres = 0.0;
    double final_fres = 0.0;
    /// Accepted edits.
    int iterations = 0;
    std::vector<RewriteStep> trace;
};

/// Steers the FRES of `source` toward `target_level` with local edits:
/// synonym swaps from the lexicon, sentence splits at commas, semicolons,
/// colons and conjunctions, and merges of adjacent sentences with ", and".
/// Each round applies the edit whose predicted score lands closest to the
/// target and keeps it only if the measured distance shrinks. Stops within
/// `tolerance`, after `max_iterations` accepted edits, or when no edit helps.
/// Text already within tolerance is returned unchanged. Deterministic for a
/// given (source, target, seed); the seed only breaks ties between edits.
/// Throws EmptyText.
MockRewriteResult mock_rewrite(std::string_view source, int target_level, std::uint64_t seed = 0,
                               const MockRewriteOptions& options = {});

}  // namespace readctl
