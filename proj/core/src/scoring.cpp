#include "readctl/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "readctl/errors.hpp"

namespace readctl {

void to_json(nlohmann::json& j, const ExampleScore& e) {
    nlohmann::json gen = nlohmann::json::object();
    for (const auto& [level, v] : e.generated_fres) gen[std::to_string(level)] = v;
    j = {{"source_id", e.source_id},       {"source_fres", e.source_fres}, {"generated_fres", gen},
         {"spearman_rho", e.spearman_rho}, {"rmse", e.rmse},               {"accuracy", e.accuracy},
         {"empty_generations", e.empty_generations}};
}

void from_json(const nlohmann::json& j, ExampleScore& e) {
    j.at("source_id").get_to(e.source_id);
    j.at("source_fres").get_to(e.source_fres);
    e.generated_fres.clear();
    for (const auto& [k, v] : j.at("generated_fres").items()) e.generated_fres[std::stoi(k)] = v.get<double>();
    j.at("spearman_rho").get_to(e.spearman_rho);
    j.at("rmse").get_to(e.rmse);
    j.at("accuracy").get_to(e.accuracy);
    e.empty_generations = j.value("empty_generations", std::size_t{0});
}

void to_json(nlohmann::json& j, const PopulationFit& f) {
    j = {{"target_level", f.target_level}, {"pcc", f.pcc},          {"slope", f.slope},
         {"intercept", f.intercept},       {"r_squared", f.r_squared}, {"n", f.n}};
}

void from_json(const nlohmann::json& j, PopulationFit& f) {
    j.at("target_level").get_to(f.target_level);
    j.at("pcc").get_to(f.pcc);
    j.at("slope").get_to(f.slope);
    j.at("intercept").get_to(f.intercept);
    j.at("r_squared").get_to(f.r_squared);
    j.at("n").get_to(f.n);
}

void to_json(nlohmann::json& j, const PairScore& p) {
    j = {{"source_id", p.source_id},
         {"target_level", p.target_level},
         {"source_fres", p.source_fres},
         {"generated_fres", p.generated_fres},
         {"source_words", p.source_words},
         {"generated_words", p.generated_words},
         {"fallback", p.fallback},
         {"self_wer", p.metrics.self_wer},
         {"length_change_pct", p.metrics.length_change_pct}};
    if (p.metrics.semantic) {
        j["sem_precision"] = p.metrics.semantic->precision;
        j["sem_recall"] = p.metrics.semantic->recall;
        j["sem_f1"] = p.metrics.semantic->f1;
    }
}

void from_json(const nlohmann::json& j, PairScore& p) {
    j.at("source_id").get_to(p.source_id);
    j.at("target_level").get_to(p.target_level);
    j.at("source_fres").get_to(p.source_fres);
    j.at("generated_fres").get_to(p.generated_fres);
    p.source_words = j.value("source_words", 0L);
    p.generated_words = j.value("generated_words", 0L);
    p.fallback = j.value("fallback", false);
    j.at("self_wer").get_to(p.metrics.self_wer);
    j.at("length_change_pct").get_to(p.metrics.length_change_pct);
    p.metrics.semantic.reset();
    if (j.contains("sem_f1")) {
        p.metrics.semantic = SemanticScore{j.at("sem_precision").get<double>(), j.at("sem_recall").get<double>(),
                                           j.at("sem_f1").get<double>()};
    }
}

void to_json(nlohmann::json& j, const FitResult& f) {
    j = {{"target_level", f.target_level}};
    if (f.fit) {
        j["fit"] = *f.fit;
    } else {
        j["fit"] = nullptr;
        j["undefined_reason"] = f.undefined_reason;
    }
}

void from_json(const nlohmann::json& j, FitResult& f) {
    j.at("target_level").get_to(f.target_level);
    f.fit.reset();
    f.undefined_reason.clear();
    if (j.contains("fit") && !j.at("fit").is_null()) {
        f.fit = j.at("fit").get<PopulationFit>();
    } else {
        f.undefined_reason = j.value("undefined_reason", std::string{});
    }
}

void to_json(nlohmann::json& j, const RunScores& s) {
    j = {{"run_id", s.run_id},     {"targets", s.targets}, {"semantic", s.semantic},
         {"examples", s.examples}, {"pairs", s.pairs},     {"fits", s.fits},
         {"unscorable_sources", s.unscorable_sources}};
}

void from_json(const nlohmann::json& j, RunScores& s) {
    j.at("run_id").get_to(s.run_id);
    j.at("targets").get_to(s.targets);
    s.semantic = j.value("semantic", false);
    j.at("examples").get_to(s.examples);
    j.at("pairs").get_to(s.pairs);
    j.at("fits").get_to(s.fits);
    s.unscorable_sources = j.value("unscorable_sources", std::vector<std::string>{});
}

std::vector<FitResult> population_fits(std::span<const ExampleScore> examples, std::span<const int> targets) {
    std::vector<double> xs;
    xs.reserve(examples.size());
    for (const auto& e : examples) xs.push_back(e.source_fres);
    std::vector<FitResult> out;
    for (int t : targets) {
        FitResult r;
        r.target_level = t;
        std::vector<double> ys;
        ys.reserve(examples.size());
        for (const auto& e : examples) ys.push_back(e.generated_fres.at(t));
        try {
            r.fit = ols_fit(xs, ys, t);
        } catch (const DegenerateInput& e) {
            r.undefined_reason = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

struct SourceRecords {
    std::map<int, const GenerationRecord*> step1;
    std::map<int, const GenerationRecord*> final;
};

struct SourceResult {
    std::optional<ExampleScore> example;
    std::vector<PairScore> pairs;
};

SourceResult score_source(const std::string& id, const SourceRecords& recs, const ScoreOptions& options) {
    SourceResult out;
    const std::string& source_text = recs.step1.begin()->second->input_text;
    TextAnalysis src;
    try {
        src = fres(source_text, options.syllables);
    } catch (const EmptyText&) {
        return out;
    }
    std::vector<GenerationRecord> finals;
    finals.reserve(options.targets.size());
    for (int t : options.targets) finals.push_back(*recs.final.at(t));
    out.example = score_example(id, src, finals, options.targets, options.syllables);

    const auto src_tokens = normalized_tokens(source_text);
    for (int t : options.targets) {
        const auto& rec = *recs.final.at(t);
        TextAnalysis gen;
        std::string gen_text = rec.output_text;
        try {
            gen = fres(gen_text, options.syllables);
        } catch (const EmptyText&) {
            gen = src;
            gen_text = source_text;
        }
        PairScore p;
        p.source_id = id;
        p.target_level = t;
        p.source_fres = src.fres;
        p.generated_fres = gen.fres;
        p.source_words = static_cast<long>(src.n_words);
        p.generated_words = static_cast<long>(gen.n_words);
        p.fallback = rec.fallback;
        p.metrics.self_wer = self_wer(src_tokens, normalized_tokens(gen_text));
        p.metrics.length_change_pct = length_change(src, gen);
        if (options.embeddings != nullptr) {
            p.metrics.semantic = semantic_score(*options.embeddings, source_text, gen_text);
        }
        out.pairs.push_back(std::move(p));
    }
    return out;
}

}  // namespace

RunScores score_run(std::span<const GenerationRecord> records, std::span<const std::string> expected_sources,
                    const ScoreOptions& options) {
    std::map<std::string, SourceRecords> by_source;
    std::string run_id;
    for (const auto& r : records) {
        if (run_id.empty()) {
            run_id = r.run_id;
        }
        auto& s = by_source[r.source_id];
        if (r.step == 1) {
            s.step1[r.target_level] = &r;
        }
        if (r.is_final) {
            s.final[r.target_level] = &r;
        }
    }
    std::set<std::string> ids(expected_sources.begin(), expected_sources.end());
    if (ids.empty()) {
        for (const auto& [id, s] : by_source) ids.insert(id);
    }

    std::vector<std::string> missing;
    for (const auto& id : ids) {
        const auto it = by_source.find(id);
        for (int t : options.targets) {
            if (it == by_source.end() || !it->second.step1.contains(t) || !it->second.final.contains(t)) {
                missing.push_back("(" + id + ", " + std::to_string(t) + ")");
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " missing (source, target) pair(s):";
        for (const auto& m : missing) msg += " " + m;
        throw IncompleteRun(msg);
    }

    const std::vector<std::string> order(ids.begin(), ids.end());
    std::vector<SourceResult> results(order.size());
    std::atomic<std::size_t> next = 0;
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
        const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, order.size()));
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < order.size(); i = next++) {
                    try {
                        results[i] = score_source(order[i], by_source.at(order[i]), options);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure) failure = std::current_exception();
                        next = order.size();
                        return;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    RunScores out;
    out.run_id = run_id;
    out.targets = options.targets;
    out.semantic = options.embeddings != nullptr;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!results[i].example) {
            out.unscorable_sources.push_back(order[i]);
            continue;
        }
        out.examples.push_back(std::move(*results[i].example));
        for (auto& p : results[i].pairs) out.pairs.push_back(std::move(p));
    }
    out.fits = population_fits(out.examples, out.targets);
    return out;
}

void save_scores(const std::filesystem::path& path, const RunScores& scores) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << nlohmann::json(scores).dump(1) << '\n';
        if (!out) {
            throw StorageError("cannot write " + tmp);
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw StorageError("cannot write " + path.string() + ": " + ec.message());
    }
}

RunScores load_scores(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot read " + path.string() + " (run score first)");
    }
    try {
        return nlohmann::json::parse(in).get<RunScores>();
    } catch (const nlohmann::json::exception& e) {
        throw StorageError(path.string() + ": bad scores file: " + e.what());
    }
}

}  // namespace readctl
