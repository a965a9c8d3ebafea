#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "readctl/errors.hpp"
#include "readctl/pipeline.hpp"
#include "readctl/scoring.hpp"
#include "support/synthetic.hpp"

using namespace readctl;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("readctl-pipe-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::vector<CorpusEntry> entries(const std::vector<synth::Passage>& ps) {
    std::vector<CorpusEntry> out;
    for (const auto& p : ps) out.push_back({p.id, p.text, {}});
    return out;
}

RunManifest manifest_for(std::span<const CorpusEntry> corpus, PipelineMode mode, const std::string& id = "r1") {
    RunManifest m;
    m.run_id = id;
    m.mode = mode;
    m.corpus.path = "synthetic";
    m.corpus.sha256 = corpus_hash(corpus);
    m.corpus.entries = corpus.size();
    m.created_at = "2026-01-01T00:00:00Z";
    return m;
}

std::vector<std::string> sorted_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    std::sort(lines.begin(), lines.end());
    return lines;
}

// Scripted provider: a function of (request, call number).
class FakeProvider final : public Provider {
public:
    using Fn = std::function<ProviderOutput(const ChatRequest&, int)>;
    explicit FakeProvider(Fn fn) : fn_(std::move(fn)) {}
    ProviderOutput generate(const ChatRequest& r) override { return fn_(r, calls++); }
    std::atomic<int> calls = 0;

private:
    Fn fn_;
};

// Kills the "process" after `limit` generations.
class CrashingProvider final : public Provider {
public:
    CrashingProvider(int limit, std::uint64_t seed) : limit_(limit), inner_(seed) {}
    ProviderOutput generate(const ChatRequest& r) override {
        if (calls_++ >= limit_) {
            throw std::runtime_error("simulated crash");
        }
        return inner_.generate(r);
    }

private:
    int limit_;
    std::atomic<int> calls_ = 0;
    MockProvider inner_;
};

}  // namespace

TEST(Pipeline, ModeStrings) {
    for (auto m : {PipelineMode::OneStep, PipelineMode::TwoStep, PipelineMode::Copy}) {
        EXPECT_EQ(pipeline_mode_from_string(to_string(m)), m);
    }
    EXPECT_THROW(pipeline_mode_from_string("three-step"), ConfigError);
}

TEST(Pipeline, CorpusHash) {
    const std::vector<CorpusEntry> a{{"1", "Hello.", {}}, {"2", "World.", {}}};
    auto b = a;
    EXPECT_EQ(corpus_hash(a), corpus_hash(b));
    EXPECT_EQ(corpus_hash(a).size(), 64u);
    b[1].text = "World!";
    EXPECT_NE(corpus_hash(a), corpus_hash(b));
    // id/text boundaries matter
    const std::vector<CorpusEntry> c{{"1H", "ello.", {}}, {"2", "World.", {}}};
    EXPECT_NE(corpus_hash(a), corpus_hash(c));
    EXPECT_EQ(corpus_hash(std::vector<CorpusEntry>{}),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Pipeline, ManifestRoundTripAndValidation) {
    const std::vector<CorpusEntry> corpus{{"a", "One two.", {}}};
    auto m = manifest_for(corpus, PipelineMode::TwoStep);
    TempDir tmp;
    save_manifest(tmp.path() / "m.json", m);
    const auto back = load_manifest(tmp.path() / "m.json");
    EXPECT_EQ(nlohmann::json(back), nlohmann::json(m));
    m.targets = {5, 5};
    EXPECT_THROW(m.validate(), ConfigError);
    m.targets = {5};
    m.run_id = "../x";
    EXPECT_THROW(m.validate(), ConfigError);
    EXPECT_TRUE(make_run_id().starts_with("run-"));
}

TEST(Pipeline, CopyModeWritesSourceForEveryTarget) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(10, 10, 90, 3));
    MockProvider p;
    const auto s = run(manifest_for(corpus, PipelineMode::Copy), corpus, p, {tmp.path() / "r1"});
    EXPECT_EQ(s.written, 80u);
    const auto recs = read_records(tmp.path() / "r1" / "records.jsonl");
    ASSERT_EQ(recs.size(), 80u);
    for (const auto& r : recs) {
        EXPECT_FALSE(r.fallback);
        EXPECT_TRUE(r.is_final);
        EXPECT_EQ(r.output_text, r.input_text);
        EXPECT_EQ(r.provider.model, "copy");
    }
    const auto scores = score_run(recs, {});
    ASSERT_EQ(scores.examples.size(), 10u);
    for (const auto& e : scores.examples) {
        EXPECT_EQ(e.accuracy, 0.125);
        EXPECT_EQ(e.spearman_rho, 0.0);
    }
    for (const auto& f : scores.fits) {
        ASSERT_TRUE(f.fit);
        EXPECT_NEAR(f.fit->pcc, 1.0, 1e-12);
        EXPECT_NEAR(f.fit->slope, 1.0, 1e-12);
        EXPECT_NEAR(f.fit->intercept, 0.0, 1e-9);
    }
    for (const auto& pr : scores.pairs) {
        EXPECT_EQ(pr.metrics.self_wer, 0.0);
        EXPECT_EQ(pr.metrics.length_change_pct, 0.0);
        EXPECT_FALSE(pr.metrics.semantic);
    }
}

TEST(Pipeline, MockOneStepHitsTargets) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(50, 10, 95, 11));
    MockProvider p(5);
    RunOptions o;
    o.workers = 8;
    const auto s = run(manifest_for(corpus, PipelineMode::OneStep), corpus, p, {tmp.path()}, o);
    EXPECT_EQ(s.written, 400u);
    const auto recs = read_records(tmp.path() / "records.jsonl");
    std::size_t within = 0;
    for (const auto& r : recs) {
        within += std::abs(fres(r.output_text).fres - r.target_level) <= 4.0;
    }
    EXPECT_GE(static_cast<double>(within) / recs.size(), 0.9);
    const auto scores = score_run(recs, {});
    double rho = 0, acc = 0;
    for (const auto& e : scores.examples) {
        rho += e.spearman_rho;
        acc += e.accuracy;
    }
    EXPECT_GE(rho / 50, 0.95);
    EXPECT_GE(acc / 50, 0.80);
}

TEST(Pipeline, TwoStepNeverMovesAway) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(20, 10, 95, 17));
    MockProvider p(2);
    run(manifest_for(corpus, PipelineMode::TwoStep), corpus, p, {tmp.path()});
    const auto recs = read_records(tmp.path() / "records.jsonl");
    ASSERT_EQ(recs.size(), 320u);
    std::map<std::pair<std::string, int>, double> gap1;
    std::size_t ok = 0, n = 0;
    for (const auto& r : recs) {
        const double gap = std::abs(fres(r.output_text).fres - r.target_level);
        if (r.step == 1) {
            EXPECT_FALSE(r.is_final);
            gap1[{r.source_id, r.target_level}] = gap;
        }
    }
    for (const auto& r : recs) {
        if (r.step != 2) continue;
        EXPECT_TRUE(r.is_final);
        const auto& s1 = *std::find_if(recs.begin(), recs.end(), [&](const auto& x) {
            return x.step == 1 && x.source_id == r.source_id && x.target_level == r.target_level;
        });
        EXPECT_EQ(r.input_text, s1.output_text);
        const double gap = std::abs(fres(r.output_text).fres - r.target_level);
        ok += gap <= gap1[{r.source_id, r.target_level}] + 1e-12;
        ++n;
    }
    EXPECT_GE(static_cast<double>(ok) / n, 0.95);
}

TEST(Pipeline, StepTwoGarbageKeepsStepOneOutput) {
    TempDir tmp;
    const std::vector<CorpusEntry> corpus{{"a", synth::read_fixture("ballroom/source.txt"), {}}};
    FakeProvider p([](const ChatRequest& r, int) {
        // the step-2 document is the step-1 output, which starts with "Rewritten"
        if (r.document.starts_with("Rewritten")) return ProviderOutput{"zzzz qqqq xxxx", {}};
        return ProviderOutput{"Rewritten text that is fine to read and long enough.", {}};
    });
    auto m = manifest_for(corpus, PipelineMode::TwoStep);
    m.targets = {40, 95};
    run(m, corpus, p, {tmp.path()});
    for (const auto& r : read_records(tmp.path() / "records.jsonl")) {
        if (r.step == 1) {
            EXPECT_FALSE(r.fallback);
        } else {
            EXPECT_TRUE(r.fallback);
            EXPECT_TRUE(r.fallback_reason.starts_with("garbage:")) << r.fallback_reason;
            EXPECT_EQ(r.output_text, "Rewritten text that is fine to read and long enough.");
        }
    }
}

TEST(Pipeline, StepOneGarbageCascadesToSource) {
    TempDir tmp;
    const auto src = synth::read_fixture("ballroom/source.txt");
    const std::vector<CorpusEntry> corpus{{"a", src, {}}};
    FakeProvider p([](const ChatRequest&, int call) {
        return call == 0 ? ProviderOutput{"", {}} : ProviderOutput{"A fine and readable paraphrase here.", {}};
    });
    auto m = manifest_for(corpus, PipelineMode::TwoStep);
    m.targets = {40};
    RunOptions o;
    o.workers = 1;
    run(m, corpus, p, {tmp.path()}, o);
    const auto recs = read_records(tmp.path() / "records.jsonl");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_TRUE(recs[0].fallback);
    EXPECT_EQ(recs[0].fallback_reason, "garbage: empty output");
    EXPECT_EQ(recs[0].output_text, src);
    EXPECT_EQ(recs[1].input_text, src);
    EXPECT_FALSE(recs[1].fallback);
}

TEST(Pipeline, ProviderErrorFallsBack) {
    TempDir tmp;
    const std::vector<CorpusEntry> corpus{{"a", "The cat sat on the mat.", {}}};
    FakeProvider p([](const ChatRequest&, int) -> ProviderOutput { throw TimeoutError("slow"); });
    const auto s = run(manifest_for(corpus, PipelineMode::OneStep), corpus, p, {tmp.path()});
    EXPECT_EQ(s.fallbacks, 8u);
    for (const auto& r : read_records(tmp.path() / "records.jsonl")) {
        EXPECT_TRUE(r.fallback);
        EXPECT_EQ(r.output_text, r.input_text);
        EXPECT_NE(r.fallback_reason.find("slow"), std::string::npos);
    }
}

TEST(Pipeline, AuthErrorAborts) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(6, 20, 80, 4));
    FakeProvider p([](const ChatRequest&, int) -> ProviderOutput { throw AuthError("401"); });
    EXPECT_THROW(run(manifest_for(corpus, PipelineMode::OneStep), corpus, p, {tmp.path()}), AbortedByAuthError);
    EXPECT_EQ(read_records(tmp.path() / "records.jsonl").size(), 0u);
}

TEST(Pipeline, MissingCredentialLeavesNoRun) {
    TempDir tmp;
    const std::vector<CorpusEntry> corpus{{"a", "The cat sat.", {}}};
    ::unsetenv("READCTL_PIPE_ABSENT");
    ProviderConfig c;
    c.kind = ProviderKind::ChatHttp;
    c.endpoint = "http://127.0.0.1:9";
    c.model_name = "m";
    c.api_key_env = "READCTL_PIPE_ABSENT";
    ChatHttpProvider p(c);
    auto m = manifest_for(corpus, PipelineMode::OneStep);
    m.provider = c;
    EXPECT_THROW(run(m, corpus, p, {tmp.path() / "run"}), AbortedByAuthError);
    EXPECT_FALSE(fs::exists(tmp.path() / "run"));
}

TEST(Pipeline, ResumeAfterCrashMatchesCleanRun) {
    const auto corpus = entries(synth::corpus(12, 10, 95, 29));
    for (auto mode : {PipelineMode::OneStep, PipelineMode::TwoStep}) {
        TempDir clean, crashed;
        MockProvider full(3);
        run(manifest_for(corpus, mode), corpus, full, {clean.path()});

        std::mt19937 rng(static_cast<unsigned>(mode == PipelineMode::TwoStep) + 99);
        const int limit = std::uniform_int_distribution<int>(1, 90)(rng);
        CrashingProvider dying(limit, 3);
        RunOptions o;
        o.workers = 3;
        EXPECT_THROW(run(manifest_for(corpus, mode), corpus, dying, {crashed.path()}, o), std::runtime_error);
        const auto partial = read_records(crashed.path() / "records.jsonl").size();
        EXPECT_GT(partial, 0u);

        // a crash mid-write leaves half a line behind
        {
            std::ofstream tail(crashed.path() / "records.jsonl", std::ios::app | std::ios::binary);
            tail << R"({"run_id":"r1","source_id":"syn0)";
        }
        MockProvider again(3);
        const auto s = run(manifest_for(corpus, mode), corpus, again, {crashed.path()}, o);
        EXPECT_EQ(s.skipped, partial);
        EXPECT_EQ(sorted_lines(clean.path() / "records.jsonl"), sorted_lines(crashed.path() / "records.jsonl"));

        // resuming a complete run does nothing
        const auto noop = run(manifest_for(corpus, mode), corpus, again, {crashed.path()});
        EXPECT_EQ(noop.written, 0u);
    }
}

TEST(Pipeline, ResumeRefusesChangedCorpus) {
    TempDir tmp;
    auto corpus = entries(synth::corpus(3, 20, 80, 8));
    MockProvider p;
    run(manifest_for(corpus, PipelineMode::Copy), corpus, p, {tmp.path()});
    corpus[1].text += " Extra.";
    EXPECT_THROW(run(manifest_for(corpus, PipelineMode::Copy), corpus, p, {tmp.path()}), CorpusHashMismatch);
    // the manifest handed in must describe the corpus too
    auto stale = manifest_for(corpus, PipelineMode::Copy);
    stale.corpus.sha256 = "0";
    EXPECT_THROW(run(stale, corpus, p, {tmp.path() / "new"}), CorpusHashMismatch);
}

TEST(Pipeline, ResumeRefusesDifferentSettings) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(2, 20, 80, 8));
    MockProvider p;
    run(manifest_for(corpus, PipelineMode::Copy), corpus, p, {tmp.path()});
    EXPECT_THROW(run(manifest_for(corpus, PipelineMode::OneStep), corpus, p, {tmp.path()}), ConfigError);
}

TEST(RecordStore, ExactlyOnceAndCorruption) {
    TempDir tmp;
    const auto path = tmp.path() / "s.jsonl";
    GenerationRecord r;
    r.run_id = "r";
    r.source_id = "a";
    r.target_level = 5;
    r.input_text = r.output_text = "x";
    {
        RecordStore s(path);
        s.append(r);
        EXPECT_THROW(s.append(r), StorageError);
        EXPECT_TRUE(s.contains(key_of(r)));
    }
    {
        std::ofstream out(path, std::ios::app);
        out << "{broken\n";
    }
    {
        RecordStore s(path);  // broken last line is a torn write
        EXPECT_TRUE(s.repaired());
        EXPECT_EQ(s.size(), 1u);
        r.target_level = 20;
        s.append(r);
    }
    {
        std::ofstream out(path, std::ios::app);
        out << "{broken\n";
        out << nlohmann::json(r).dump() << "\n";
    }
    EXPECT_THROW(RecordStore{path}, StorageError);
}

TEST(Scoring, IncompleteRunNamesMissingPairs) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(3, 20, 80, 8));
    MockProvider p;
    run(manifest_for(corpus, PipelineMode::Copy), corpus, p, {tmp.path()});
    auto recs = read_records(tmp.path() / "records.jsonl");
    const auto victim = recs[5];
    recs.erase(recs.begin() + 5);
    try {
        score_run(recs, {});
        FAIL() << "expected IncompleteRun";
    } catch (const IncompleteRun& e) {
        const std::string want = "(" + victim.source_id + ", " + std::to_string(victim.target_level) + ")";
        EXPECT_NE(std::string(e.what()).find(want), std::string::npos) << e.what();
    }
    std::vector<std::string> ids{"syn000", "syn001", "syn002", "nope"};
    recs = read_records(tmp.path() / "records.jsonl");
    EXPECT_THROW(score_run(recs, ids), IncompleteRun);
}

TEST(Scoring, DeterministicAndRoundTrips) {
    TempDir tmp;
    const auto corpus = entries(synth::corpus(8, 10, 95, 41));
    MockProvider p(1);
    run(manifest_for(corpus, PipelineMode::OneStep), corpus, p, {tmp.path()});
    const auto recs = read_records(tmp.path() / "records.jsonl");
    LexiconEmbeddingProvider emb;
    ScoreOptions o;
    o.embeddings = &emb;
    o.workers = 4;
    const auto a = score_run(recs, {}, o);
    o.workers = 1;
    const auto b = score_run(recs, {}, o);
    EXPECT_EQ(nlohmann::json(a).dump(), nlohmann::json(b).dump());
    EXPECT_TRUE(a.semantic);
    for (const auto& pr : a.pairs) {
        ASSERT_TRUE(pr.metrics.semantic);
        EXPECT_GT(pr.metrics.semantic->f1, 0.0);
        EXPECT_LE(pr.metrics.semantic->f1, 1.0 + 1e-12);
    }
    save_scores(tmp.path() / "scores.json", a);
    const auto back = load_scores(tmp.path() / "scores.json");
    EXPECT_EQ(nlohmann::json(back), nlohmann::json(a));
}

TEST(Scoring, EmptyGenerationScoredAsCopy) {
    GenerationRecord base;
    base.run_id = "r";
    base.source_id = "a";
    base.input_text = "The cat sat on the mat. It was warm.";
    base.is_final = true;
    std::vector<GenerationRecord> recs;
    for (int t : kTargetLevels) {
        auto r = base;
        r.target_level = t;
        r.output_text = t == 40 ? "..." : base.input_text;
        recs.push_back(r);
    }
    const auto s = score_run(recs, {});
    ASSERT_EQ(s.examples.size(), 1u);
    EXPECT_EQ(s.examples[0].empty_generations, 1u);
    EXPECT_EQ(s.pairs[2].metrics.self_wer, 0.0);
    // one source: every fit is degenerate
    for (const auto& f : s.fits) EXPECT_FALSE(f.fit);
}
