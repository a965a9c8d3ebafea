#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "readctl/dataset.hpp"
#include "readctl/garbage.hpp"
#include "readctl/prompts.hpp"
#include "readctl/provider.hpp"
#include "readctl/records.hpp"

namespace readctl {

enum class PipelineMode { OneStep, TwoStep, Copy };

std::string to_string(PipelineMode mode);
/// "one-step", "two-step" or "copy". Throws ConfigError.
PipelineMode pipeline_mode_from_string(const std::string& s);

/// Hex SHA-256 over the entries in order (id and text of each).
std::string corpus_hash(std::span<const CorpusEntry> entries);

struct CorpusRef {
    std::string path;
    std::string sha256;
    std::size_t entries = 0;
    /// How the file was read, so later stages can reload it.
    std::string text_column = "text";
    std::string id_column;
    char delimiter = ',';

    bool operator==(const CorpusRef&) const = default;
};

struct RunManifest {
    std::string run_id;
    CorpusRef corpus;
    ProviderConfig provider;
    PipelineMode mode = PipelineMode::OneStep;
    std::vector<int> targets{kTargetLevels.begin(), kTargetLevels.end()};
    std::string created_at;

    /// Throws ConfigError on an empty run id or targets that are not
    /// strictly increasing.
    void validate() const;
};

void to_json(nlohmann::json& j, const CorpusRef& c);
void from_json(const nlohmann::json& j, CorpusRef& c);
void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

/// "run-YYYYMMDD-HHMMSS-xxxx" in UTC.
std::string make_run_id();
/// ISO-8601 UTC timestamp.
std::string utc_timestamp();

/// Append-only JSONL store of generation records, one object per line.
/// Opening repairs a torn final line left by a crash. Appends from many
/// threads are serialized and flushed line by line.
class RecordStore {
public:
    /// Creates the file if missing. Throws StorageError on a corrupt line
    /// other than the last, or on a duplicate key.
    explicit RecordStore(std::filesystem::path path);
    ~RecordStore();
    RecordStore(const RecordStore&) = delete;
    RecordStore& operator=(const RecordStore&) = delete;

    bool contains(const RecordKey& key) const;
    std::optional<GenerationRecord> find(const RecordKey& key) const;
    /// Throws StorageError when the key is already stored.
    void append(const GenerationRecord& record);

    /// Sorted by key.
    std::vector<GenerationRecord> records() const;
    std::size_t size() const;
    /// True when opening dropped a torn line.
    bool repaired() const noexcept { return repaired_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::map<RecordKey, GenerationRecord> index_;
    std::FILE* file_ = nullptr;
    bool repaired_ = false;
};

/// Reads a store without repairing it. Throws StorageError.
std::vector<GenerationRecord> read_records(const std::filesystem::path& path);

/// File layout of one run directory.
struct RunPaths {
    std::filesystem::path dir;
    std::filesystem::path manifest() const { return dir / "manifest.json"; }
    std::filesystem::path records() const { return dir / "records.jsonl"; }
};

RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);

struct RunOptions {
    std::size_t workers = 4;
    const PromptCatalog* prompts = nullptr;  // defaults to the standard catalog
    GarbageThresholds garbage;
    /// Called from worker threads after each record is persisted.
    std::function<void(const GenerationRecord&)> on_record;
};

struct RunSummary {
    std::string run_id;
    std::size_t sources = 0;
    std::size_t written = 0;
    std::size_t skipped = 0;  // already in the store
    std::size_t fallbacks = 0;
};

/// Generates every (source, target) pair of `corpus` into `paths.records()`.
/// A new run writes the manifest; an existing manifest means resume, and
/// pairs already stored are skipped. Sources are spread over a worker pool,
/// targets run in ascending order within a source.
///
/// Provider failures other than AuthError and garbage output fall back to
/// the record's input text with fallback=true. In two-step mode step 1
/// reads the source and step 2 re-sends the same prompt with the step-1
/// output as the document; only step 2 is final. Copy mode never calls the
/// provider.
///
/// Throws CorpusHashMismatch, ConfigError (manifest disagrees on mode or
/// targets), StorageError, AbortedByAuthError.
RunSummary run(const RunManifest& manifest, std::span<const CorpusEntry> corpus, Provider& provider,
               const RunPaths& paths, const RunOptions& options = {});

}  // namespace readctl
