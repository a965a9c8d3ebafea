#include "readctl/pipeline.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "readctl/errors.hpp"

namespace readctl {

std::string to_string(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::OneStep:
            return "one-step";
        case PipelineMode::TwoStep:
            return "two-step";
        case PipelineMode::Copy:
            return "copy";
    }
    return "one-step";
}

PipelineMode pipeline_mode_from_string(const std::string& s) {
    if (s == "one-step") return PipelineMode::OneStep;
    if (s == "two-step") return PipelineMode::TwoStep;
    if (s == "copy") return PipelineMode::Copy;
    throw ConfigError("unknown mode \"" + s + "\" (expected one-step, two-step or copy)");
}

std::string corpus_hash(std::span<const CorpusEntry> entries) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw StorageError("sha256 unavailable");
    }
    const char zero = '\0';
    for (const auto& e : entries) {
        EVP_DigestUpdate(ctx.get(), e.source_id.data(), e.source_id.size());
        EVP_DigestUpdate(ctx.get(), &zero, 1);
        EVP_DigestUpdate(ctx.get(), e.text.data(), e.text.size());
        EVP_DigestUpdate(ctx.get(), &zero, 1);
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 15];
    }
    return hex;
}

void RunManifest::validate() const {
    if (run_id.empty()) {
        throw ConfigError("run id is empty");
    }
    if (run_id.find_first_of("/\\") != std::string::npos || run_id == "." || run_id == "..") {
        throw ConfigError("run id must not contain path separators: " + run_id);
    }
    if (targets.empty()) {
        throw ConfigError("no target levels");
    }
    for (std::size_t i = 1; i < targets.size(); ++i) {
        if (targets[i] <= targets[i - 1]) {
            throw ConfigError("targets must be strictly increasing");
        }
    }
    provider.validate();
}

void to_json(nlohmann::json& j, const CorpusRef& c) {
    j = {{"path", c.path},
         {"sha256", c.sha256},
         {"entries", c.entries},
         {"text_column", c.text_column},
         {"id_column", c.id_column},
         {"delimiter", std::string(1, c.delimiter)}};
}

void from_json(const nlohmann::json& j, CorpusRef& c) {
    c.path = j.value("path", std::string{});
    j.at("sha256").get_to(c.sha256);
    c.entries = j.value("entries", std::size_t{0});
    c.text_column = j.value("text_column", std::string("text"));
    c.id_column = j.value("id_column", std::string{});
    const auto d = j.value("delimiter", std::string(","));
    c.delimiter = d.empty() ? ',' : d.front();
}

void to_json(nlohmann::json& j, const RunManifest& m) {
    j = {{"run_id", m.run_id},         {"corpus", m.corpus},   {"provider", m.provider},
         {"mode", to_string(m.mode)},  {"targets", m.targets}, {"created_at", m.created_at}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
    j.at("run_id").get_to(m.run_id);
    j.at("corpus").get_to(m.corpus);
    m.provider = j.contains("provider") ? j.at("provider").get<ProviderConfig>() : ProviderConfig{};
    m.mode = pipeline_mode_from_string(j.value("mode", std::string("one-step")));
    j.at("targets").get_to(m.targets);
    m.created_at = j.value("created_at", std::string{});
}

namespace {

std::tm utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return tm;
}

}  // namespace

std::string utc_timestamp() {
    const auto tm = utc_now();
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string make_run_id() {
    const auto tm = utc_now();
    char buf[32];
    std::strftime(buf, sizeof buf, "run-%Y%m%d-%H%M%S", &tm);
    std::random_device rd;
    char suffix[8];
    std::snprintf(suffix, sizeof suffix, "-%04x", rd() & 0xffffu);
    return std::string(buf) + suffix;
}

// --- record store -----------------------------------------------------------------

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ParsedStore {
    std::vector<GenerationRecord> records;
    std::size_t valid_bytes = 0;  // prefix holding complete, parseable lines
    bool torn = false;
};

ParsedStore parse_store(const std::string& data, const std::filesystem::path& path) {
    ParsedStore out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < data.size()) {
        ++line_no;
        const auto nl = data.find('\n', pos);
        const bool last = nl == std::string::npos || nl + 1 == data.size();
        const std::string_view line(data.data() + pos, (nl == std::string::npos ? data.size() : nl) - pos);
        if (nl == std::string::npos) {
            out.torn = true;
            break;
        }
        if (!line.empty()) {
            try {
                out.records.push_back(nlohmann::json::parse(line).get<GenerationRecord>());
            } catch (const nlohmann::json::exception& e) {
                if (last) {
                    out.torn = true;
                    break;
                }
                throw StorageError(path.string() + ":" + std::to_string(line_no) + ": corrupt record: " + e.what());
            }
        }
        pos = nl + 1;
        out.valid_bytes = pos;
    }
    return out;
}

}  // namespace

RecordStore::RecordStore(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    if (std::filesystem::exists(path_)) {
        const auto parsed = parse_store(slurp(path_), path_);
        for (const auto& r : parsed.records) {
            if (!index_.emplace(key_of(r), r).second) {
                throw StorageError(path_.string() + ": duplicate record " + r.source_id + "/" +
                                   std::to_string(r.target_level) + "/" + std::to_string(r.step));
            }
        }
        if (parsed.torn) {
            std::filesystem::resize_file(path_, parsed.valid_bytes, ec);
            if (ec) {
                throw StorageError("cannot repair " + path_.string() + ": " + ec.message());
            }
            repaired_ = true;
        }
    }
    file_ = std::fopen(path_.c_str(), "ab");
    if (file_ == nullptr) {
        throw StorageError("cannot open " + path_.string() + " for appending");
    }
}

RecordStore::~RecordStore() {
    if (file_ != nullptr) {
        std::fclose(file_);
    }
}

bool RecordStore::contains(const RecordKey& key) const {
    std::lock_guard lock(mu_);
    return index_.contains(key);
}

std::optional<GenerationRecord> RecordStore::find(const RecordKey& key) const {
    std::lock_guard lock(mu_);
    if (const auto it = index_.find(key); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

void RecordStore::append(const GenerationRecord& record) {
    const std::string line = nlohmann::json(record).dump() + "\n";
    std::lock_guard lock(mu_);
    const auto key = key_of(record);
    if (index_.contains(key)) {
        throw StorageError("record already stored: " + record.source_id + "/" + std::to_string(record.target_level) +
                           "/" + std::to_string(record.step));
    }
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
        throw StorageError("write failed on " + path_.string());
    }
    index_.emplace(key, record);
}

std::vector<GenerationRecord> RecordStore::records() const {
    std::lock_guard lock(mu_);
    std::vector<GenerationRecord> out;
    out.reserve(index_.size());
    for (const auto& [k, r] : index_) out.push_back(r);
    return out;
}

std::size_t RecordStore::size() const {
    std::lock_guard lock(mu_);
    return index_.size();
}

std::vector<GenerationRecord> read_records(const std::filesystem::path& path) {
    auto parsed = parse_store(slurp(path), path);
    std::sort(parsed.records.begin(), parsed.records.end(),
              [](const auto& a, const auto& b) { return key_of(a) < key_of(b); });
    return std::move(parsed.records);
}

RunManifest load_manifest(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(slurp(path)).get<RunManifest>();
    } catch (const nlohmann::json::exception& e) {
        throw StorageError(path.string() + ": bad manifest: " + e.what());
    }
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << nlohmann::json(manifest).dump(2) << '\n';
        if (!out) {
            throw StorageError("cannot write " + tmp);
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw StorageError("cannot write " + path.string() + ": " + ec.message());
    }
}

// --- run --------------------------------------------------------------------------

namespace {

class Runner {
public:
    Runner(const RunManifest& m, Provider& p, RecordStore& store, const RunOptions& o)
        : manifest_(m), provider_(p), store_(store), options_(o),
          prompts_(o.prompts != nullptr ? *o.prompts : PromptCatalog::standard()) {}

    void source(const CorpusEntry& entry) {
        for (int target : manifest_.targets) {
            if (stop_.load()) {
                return;
            }
            if (manifest_.mode == PipelineMode::TwoStep) {
                const auto first = step(entry, target, 1, entry.text, false);
                step(entry, target, 2, first.output_text, true);
            } else {
                step(entry, target, 1, entry.text, true);
            }
        }
    }

    std::atomic<bool> stop_ = false;
    std::atomic<std::size_t> written = 0, skipped = 0, fallbacks = 0;

private:
    GenerationRecord step(const CorpusEntry& entry, int target, int n, const std::string& input, bool is_final) {
        const RecordKey key{manifest_.run_id, entry.source_id, target, n};
        if (auto existing = store_.find(key)) {
            ++skipped;
            return *std::move(existing);
        }
        GenerationRecord r;
        r.run_id = manifest_.run_id;
        r.source_id = entry.source_id;
        r.target_level = target;
        r.step = n;
        r.input_text = input;
        r.is_final = is_final;

        if (manifest_.mode == PipelineMode::Copy) {
            r.output_text = input;
            r.provider.model = "copy";
        } else {
            const auto request =
                build_prompt(prompts_, target, input, manifest_.provider.system_message);
            try {
                auto out = provider_.generate(request);
                r.provider = std::move(out.meta);
                if (auto reason = garbage_reason(out.text, input, options_.garbage)) {
                    r.fallback = true;
                    r.fallback_reason = "garbage: " + *reason;
                    r.output_text = input;
                } else {
                    r.output_text = std::move(out.text);
                }
            } catch (const AuthError& e) {
                stop_ = true;
                throw AbortedByAuthError(std::string("provider rejected the credential: ") + e.what());
            } catch (const ProviderError& e) {
                r.fallback = true;
                r.fallback_reason = std::string("provider error: ") + e.what();
                r.output_text = input;
            }
        }
        store_.append(r);
        ++written;
        fallbacks += r.fallback;
        if (options_.on_record) {
            options_.on_record(r);
        }
        return r;
    }

    const RunManifest& manifest_;
    Provider& provider_;
    RecordStore& store_;
    const RunOptions& options_;
    const PromptCatalog& prompts_;
};

}  // namespace

RunSummary run(const RunManifest& manifest, std::span<const CorpusEntry> corpus, Provider& provider,
               const RunPaths& paths, const RunOptions& options) {
    manifest.validate();
    const auto& prompts = options.prompts != nullptr ? *options.prompts : PromptCatalog::standard();
    if (manifest.mode != PipelineMode::Copy) {
        for (int t : manifest.targets) {
            if (!prompts.contains(t)) {
                throw UnknownLevel(t);
            }
        }
    }
    const std::string hash = corpus_hash(corpus);
    if (manifest.corpus.sha256 != hash) {
        throw CorpusHashMismatch("corpus hash " + hash + " does not match manifest " + manifest.corpus.sha256);
    }

    if (std::filesystem::exists(paths.manifest())) {
        const auto stored = load_manifest(paths.manifest());
        if (stored.corpus.sha256 != hash) {
            throw CorpusHashMismatch("corpus changed since run " + stored.run_id + " started (stored " +
                                     stored.corpus.sha256 + ", now " + hash + ")");
        }
        if (stored.run_id != manifest.run_id || stored.mode != manifest.mode || stored.targets != manifest.targets) {
            throw ConfigError("run " + stored.run_id + " was started with different settings");
        }
    } else {
        if (manifest.mode != PipelineMode::Copy) {
            try {
                provider.preflight();
            } catch (const AuthError& e) {
                throw AbortedByAuthError(e.what());
            }
        }
        save_manifest(paths.manifest(), manifest);
    }

    RecordStore store(paths.records());
    Runner runner(manifest, provider, store, options);

    std::atomic<std::size_t> next = 0;
    std::exception_ptr failure;
    std::mutex failure_mu;
    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, corpus.size()));
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next++;
                    if (i >= corpus.size() || runner.stop_.load()) {
                        return;
                    }
                    try {
                        runner.source(corpus[i]);
                    } catch (...) {
                        runner.stop_ = true;
                        std::lock_guard lock(failure_mu);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        return;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    RunSummary s;
    s.run_id = manifest.run_id;
    s.sources = corpus.size();
    s.written = runner.written;
    s.skipped = runner.skipped;
    s.fallbacks = runner.fallbacks;
    return s;
}

}  // namespace readctl
