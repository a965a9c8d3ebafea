#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "readctl/embeddings.hpp"
#include "readctl/metrics.hpp"
#include "readctl/records.hpp"

namespace readctl {

/// Metrics of one final generation.
struct PairScore {
    std::string source_id;
    int target_level = 0;
    double source_fres = 0.0;
    double generated_fres = 0.0;
    long source_words = 0;
    long generated_words = 0;
    bool fallback = false;
    PairMetrics metrics;
};

/// Fit for one target level; empty when the data are degenerate.
struct FitResult {
    int target_level = 0;
    std::optional<PopulationFit> fit;
    std::string undefined_reason;
};

struct RunScores {
    std::string run_id;
    std::vector<int> targets;
    /// Sorted by source_id.
    std::vector<ExampleScore> examples;
    /// Sorted by (source_id, target_level).
    std::vector<PairScore> pairs;
    std::vector<FitResult> fits;
    bool semantic = false;
    /// Sources without word tokens; they cannot be scored.
    std::vector<std::string> unscorable_sources;
};

struct ScoreOptions {
    std::vector<int> targets{kTargetLevels.begin(), kTargetLevels.end()};
    /// nullptr leaves semantic scores absent.
    EmbeddingProvider* embeddings = nullptr;
    const SyllableLexicon* syllables = nullptr;
    std::size_t workers = 4;
};

/// Scores every source of a run. `expected_sources` lists the corpus ids
/// (empty: the ids found in `records`). The source text is the step-1
/// input; the scored paraphrase is the final record. A final output
/// without word tokens is scored as a copy of the source.
/// Throws IncompleteRun naming each missing (source, target) pair.
RunScores score_run(std::span<const GenerationRecord> records, std::span<const std::string> expected_sources,
                    const ScoreOptions& options = {});

/// One fit per target plus nothing else; the identity row is the report's.
std::vector<FitResult> population_fits(std::span<const ExampleScore> examples, std::span<const int> targets);

void to_json(nlohmann::json& j, const RunScores& s);
void from_json(const nlohmann::json& j, RunScores& s);

/// Writes scores.json (atomically). Throws StorageError.
void save_scores(const std::filesystem::path& path, const RunScores& scores);
RunScores load_scores(const std::filesystem::path& path);

}  // namespace readctl
