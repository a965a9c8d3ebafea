#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "readctl/records.hpp"
#include "readctl/textcore.hpp"

namespace readctl {

/// Measured FRES of each generation, keyed by target level.
using LevelSeries = std::map<int, double>;

/// Individual-scale control for one source passage.
struct ExampleScore {
    std::string source_id;
    double source_fres = 0.0;
    LevelSeries generated_fres;
    double spearman_rho = 0.0;
    double rmse = 0.0;
    double accuracy = 0.0;
    /// Generations without word tokens, scored as a copy of the source.
    std::size_t empty_generations = 0;
};

/// Population-scale fit of generated FRES (y) against source FRES (x) for
/// one target level; level 0 denotes the identity "Source" row.
struct PopulationFit {
    int target_level = 0;
    double pcc = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

struct SemanticScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Paraphrase-quality scores for one (source, generated) pair.
struct PairMetrics {
    double self_wer = 0.0;
    std::optional<SemanticScore> semantic;
    double length_change_pct = 0.0;
};

/// Substitution / deletion / insertion counts of a minimal word alignment.
struct EditCounts {
    std::size_t substitutions = 0;
    std::size_t deletions = 0;
    std::size_t insertions = 0;
    std::size_t reference_length = 0;

    std::size_t distance() const noexcept { return substitutions + deletions + insertions; }
};

using Embedding = std::vector<double>;

/// Average-rank Spearman correlation. Returns 0 when either side is constant.
/// Throws std::invalid_argument on length mismatch or fewer than two values.
double spearman(std::span<const double> generated, std::span<const double> targets);
double spearman(const LevelSeries& generated);

/// sqrt(mean over levels of (measured - level)^2).
double rmse(const LevelSeries& generated);

/// Fraction of levels whose measured FRES classifies into that level's class.
double accuracy(const LevelSeries& generated);

/// Product-moment correlation. Throws DegenerateInput when n < 2 or either
/// side is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Least-squares y = slope * x + intercept. Throws DegenerateInput like pearson.
PopulationFit ols_fit(std::span<const double> xs, std::span<const double> ys, int target_level = 0);

/// Unit-cost word alignment of `hypothesis` against `reference`; ties prefer
/// substitution over a deletion/insertion pair.
EditCounts align_words(std::span<const std::string> reference, std::span<const std::string> hypothesis);

/// (S + D + I) / N with the source as reference. Throws EmptyReference.
double self_wer(std::span<const std::string> source_tokens, std::span<const std::string> generated_tokens);

/// Greedy max-cosine matching of token embeddings (no idf weighting, no
/// baseline rescaling). Throws EmptySide or DimensionMismatch.
SemanticScore semantic_score(std::span<const Embedding> source, std::span<const Embedding> generated);

/// 100 * (generated words - source words) / source words.
double length_change(const TextAnalysis& source, const TextAnalysis& generated);

/// Scores the final generations of one source. Requires exactly one record
/// per level in `targets`; a generation without word tokens is scored as a
/// copy of the source and counted in `empty_generations`.
ExampleScore score_example(const std::string& source_id, const TextAnalysis& source,
                           std::span<const GenerationRecord> generations,
                           std::span<const int> targets = kTargetLevels,
                           const SyllableLexicon* lexicon = nullptr);

}  // namespace readctl
