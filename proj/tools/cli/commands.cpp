#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <type_traits>

#include <CLI11.hpp>

#include "readctl/dataset.hpp"
#include "readctl/errors.hpp"
#include "readctl/pipeline.hpp"
#include "readctl/report.hpp"
#include "readctl/scoring.hpp"
#include "readctl/textcore.hpp"
#include "settings.hpp"

namespace fs = std::filesystem;

namespace readctl::cli {
namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::optional<SyllableLexicon> syllable_lexicon(const Settings& s) {
    if (s.syllables.empty()) {
        return std::nullopt;
    }
    return SyllableLexicon::load(s.syllables);
}

std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path run_dir(const Settings& s) {
    if (s.run_id.empty()) {
        throw ConfigError("run_id is required (--run-id)");
    }
    return fs::path(s.out_dir) / s.run_id;
}

int cmd_analyze(const Settings& s, const std::string& path, std::istream& in, std::ostream& out) {
    std::string text;
    if (path.empty() || path == "-") {
        text = read_all(in);
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f) {
            throw ConfigError("cannot read " + path);
        }
        text = read_all(f);
    }
    const auto lexicon = syllable_lexicon(s);
    const auto a = fres(text, lexicon ? &*lexicon : nullptr);
    out << "words: " << a.n_words << "\n";
    out << "sentences: " << a.n_sentences << "\n";
    out << "syllables: " << a.n_syllables << "\n";
    out << "FRES: " << fixed(a.fres, 2) << "\n";
    if (const auto c = classify(a.fres)) {
        out << "class: " << c->label << " (" << c->level << ") " << c->description << "\n";
    } else {
        out << "class: out of range\n";
    }
    return kExitOk;
}

Corpus load_settings_corpus(const Settings& s) {
    if (s.corpus.empty()) {
        throw ConfigError("corpus is required (--corpus)");
    }
    return load_corpus(s.corpus, load_options(s));
}

int cmd_generate(Settings s, std::ostream& out, std::ostream& err) {
    const auto corpus = load_settings_corpus(s);
    if (corpus.entries.empty()) {
        throw ConfigError("corpus has no passages");
    }
    const auto lo = load_options(s);

    RunManifest manifest;
    manifest.run_id = s.run_id.empty() ? make_run_id() : s.run_id;
    s.run_id = manifest.run_id;
    manifest.corpus.path = fs::absolute(s.corpus).lexically_normal().string();
    manifest.corpus.sha256 = corpus_hash(corpus.entries);
    manifest.corpus.entries = corpus.entries.size();
    manifest.corpus.text_column = lo.text_column;
    manifest.corpus.id_column = lo.id_column;
    manifest.corpus.delimiter = lo.delimiter;
    manifest.provider = provider_config(s);
    manifest.mode = pipeline_mode_from_string(s.mode);
    manifest.targets = s.targets;
    manifest.created_at = utc_timestamp();
    manifest.validate();

    const RunPaths paths{run_dir(s)};
    if (fs::exists(paths.manifest())) {
        // keep the original creation time so the manifest compares equal
        manifest.created_at = load_manifest(paths.manifest()).created_at;
    }

    auto provider = make_provider(manifest.provider);
    const auto catalog = prompt_catalog(s);

    const std::size_t total = corpus.entries.size() * manifest.targets.size() *
                              (manifest.mode == PipelineMode::TwoStep ? 2 : 1);
    std::mutex progress_mu;
    std::size_t done = 0;
    std::size_t last_decile = 0;

    RunOptions options;
    options.workers = static_cast<std::size_t>(s.workers);
    options.prompts = &catalog;
    options.garbage = garbage_thresholds(s);
    options.on_record = [&](const GenerationRecord&) {
        std::lock_guard lock(progress_mu);
        ++done;
        const std::size_t decile = done * 10 / std::max<std::size_t>(total, 1);
        if (decile != last_decile) {
            last_decile = decile;
            err << "generate: " << done << " new records\n";
        }
    };

    if (corpus.skipped_empty > 0) {
        err << "generate: skipped " << corpus.skipped_empty << " blank passage(s)\n";
    }
    const bool fresh = !fs::exists(paths.manifest());
    const auto summary = run(manifest, corpus.entries, *provider, paths, options);
    if (fresh) {
        std::ofstream f(paths.dir / "settings.json");
        f << to_json(s).dump(2) << "\n";
    }
    err << "generate: " << summary.sources << " sources, " << summary.written << " written, " << summary.skipped
        << " already stored, " << summary.fallbacks << " fallbacks\n";
    out << summary.run_id << "\n";
    return kExitOk;
}

int cmd_score(const Settings& s, std::ostream& out, std::ostream& err) {
    const RunPaths paths{run_dir(s)};
    if (!fs::exists(paths.manifest())) {
        throw ConfigError("no run at " + paths.dir.string());
    }
    const auto manifest = load_manifest(paths.manifest());

    LoadOptions lo;
    lo.text_column = manifest.corpus.text_column;
    lo.id_column = manifest.corpus.id_column;
    lo.delimiter = manifest.corpus.delimiter;
    const auto corpus = load_corpus(manifest.corpus.path, lo);
    if (corpus_hash(corpus.entries) != manifest.corpus.sha256) {
        throw CorpusHashMismatch("corpus " + manifest.corpus.path + " changed since the run was created");
    }
    std::vector<std::string> ids;
    ids.reserve(corpus.entries.size());
    for (const auto& e : corpus.entries) {
        ids.push_back(e.source_id);
    }

    const auto records = read_records(paths.records());
    const auto lexicon = syllable_lexicon(s);
    auto embeddings = make_embeddings(s);

    ScoreOptions options;
    options.targets = manifest.targets;
    options.embeddings = embeddings.get();
    options.syllables = lexicon ? &*lexicon : nullptr;
    options.workers = static_cast<std::size_t>(s.workers);
    const auto scores = score_run(records, ids, options);

    const auto path = paths.dir / "scores.json";
    save_scores(path, scores);

    if (!scores.unscorable_sources.empty()) {
        err << "score: " << scores.unscorable_sources.size() << " source(s) without words were not scored\n";
    }
    if (!scores.examples.empty()) {
        const auto summary = individual_summary(scores.examples);
        out << "rho: " << format_number(summary.rho.mean * 100) << "\n";
        out << "rmse: " << format_number(summary.rmse.mean) << "\n";
        out << "accuracy: " << format_number(summary.accuracy.mean * 100) << "\n";
    }
    out << path.string() << "\n";
    return kExitOk;
}

int cmd_report(const Settings& s, std::ostream& out) {
    const auto dir = run_dir(s);
    const auto scores_path = dir / "scores.json";
    if (!fs::exists(scores_path)) {
        throw ConfigError("no scores at " + scores_path.string() + "; run `score` first");
    }
    const auto scores = load_scores(scores_path);
    const fs::path report_dir = s.report_dir.empty() ? dir / "report" : fs::path(s.report_dir);
    for (const auto& p : export_report(scores, report_dir, report_options(s))) {
        out << p.string() << "\n";
    }
    return kExitOk;
}

int cmd_stats(const Settings& s, std::ostream& out) {
    const auto corpus = load_settings_corpus(s);
    if (corpus.entries.empty()) {
        throw ConfigError("corpus has no passages");
    }
    const auto lexicon = syllable_lexicon(s);
    const auto* lex = lexicon ? &*lexicon : nullptr;
    const auto st = corpus_stats(corpus.entries, lex, static_cast<unsigned>(s.workers));
    auto line = [&](const char* name, const MeanStd& m) {
        out << name << ": " << fixed(m.mean, 2) << " +- " << fixed(m.std, 2) << "\n";
    };
    out << "entries: " << st.entries << "\n";
    out << "skipped blank: " << corpus.skipped_empty << "\n";
    line("words", st.words);
    line("sentences", st.sentences);
    line("paragraphs", st.paragraphs);
    line("FRES", st.fres);
    const auto h = fres_histogram(corpus.entries, s.bin_width, std::nullopt, lex);
    out << "FRES histogram (width " << fixed(h.bin_width, 2) << "):\n";
    for (const auto& b : h.bins) {
        out << "  [" << fixed(b.lower, 2) << ", " << fixed(b.upper, 2) << ") " << b.count << "\n";
    }
    if (h.unscored > 0) {
        out << "  unscored " << h.unscored << "\n";
    }
    return kExitOk;
}

std::string default_text(const Settings& s, const OptionSpec& spec) {
    const auto j = to_json(s).at(spec.key);
    if (j.is_string()) {
        const auto v = j.get<std::string>();
        return v.size() > 40 ? "\"" + v.substr(0, 37) + "...\"" : v;
    }
    if (j.is_array()) {
        std::string out;
        for (const auto& v : j) {
            out += (out.empty() ? "" : ",") + v.dump();
        }
        return out;
    }
    return j.dump();
}

bool is_usage_error(const std::exception& e) {
    return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UnknownLevel*>(&e) ||
           dynamic_cast<const MissingColumn*>(&e) || dynamic_cast<const MalformedRow*>(&e) ||
           dynamic_cast<const DuplicateSourceId*>(&e) || dynamic_cast<const UnknownVariable*>(&e) ||
           dynamic_cast<const EmptyText*>(&e) || dynamic_cast<const CorpusHashMismatch*>(&e);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Readability-controlled paraphrase generation and evaluation", "readctl"};
    app.require_subcommand(1);
    app.fallthrough();
    app.footer(
        "Every option is also a key of the --config JSON object: --foo-bar is \"foo_bar\". Flags override the "
        "config file.\nExit codes: 0 success, 1 runtime failure, 2 usage or input error.");

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with flat keys")->check(CLI::ExistingFile);

    std::map<std::string, std::string> given;
    const Settings defaults;
    for (const auto& spec : option_specs()) {
        const auto flag = flag_for(spec.key);
        const auto& key = spec.key;
        if (std::holds_alternative<bool Settings::*>(spec.field)) {
            app.add_flag_function(
                flag + ",!--no-" + flag.substr(2),
                [&given, key](std::int64_t count) { given[key] = count > 0 ? "true" : "false"; }, spec.help);
        } else {
            auto* opt = app.add_option_function<std::string>(
                flag, [&given, key](const std::string& v) { given[key] = v; }, spec.help);
            std::visit(
                [&](auto member) {
                    using T = std::remove_cvref_t<decltype(defaults.*member)>;
                    if constexpr (std::is_same_v<T, double>) {
                        opt->type_name("FLOAT");
                    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
                        opt->type_name("LEVELS");
                    } else if constexpr (!std::is_same_v<T, std::string>) {
                        opt->type_name("INT");
                    }
                },
                spec.field);
            if (const auto d = default_text(defaults, spec); !d.empty()) {
                opt->default_str(d);
            }
        }
    }

    std::string analyze_path;
    auto* analyze = app.add_subcommand("analyze", "Word, sentence and syllable counts, FRES and class of a text");
    analyze->add_option("path", analyze_path, "text file; stdin when omitted or -");
    auto* generate = app.add_subcommand("generate", "Generate paraphrases for every passage and target level");
    std::string run_arg;
    auto* score = app.add_subcommand("score", "Score a finished run into scores.json");
    score->add_option("run", run_arg, "run id (same as --run-id)");
    auto* report = app.add_subcommand("report", "Export summaries, scatter series, heatmaps and charts");
    report->add_option("run", run_arg, "run id (same as --run-id)");
    auto* stats = app.add_subcommand("stats", "Corpus statistics and FRES histogram");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Settings settings;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("config " + config_path + ": " + e.what());
            }
            apply_json(settings, j);
        }
        for (const auto& spec : option_specs()) {
            if (auto it = given.find(spec.key); it != given.end()) {
                apply_text(settings, spec, it->second);
            }
        }
        if (!run_arg.empty()) {
            settings.run_id = run_arg;
        }
        validate(settings);

        if (analyze->parsed()) return cmd_analyze(settings, analyze_path, in, out);
        if (generate->parsed()) return cmd_generate(settings, out, err);
        if (score->parsed()) return cmd_score(settings, out, err);
        if (report->parsed()) return cmd_report(settings, out);
        if (stats->parsed()) return cmd_stats(settings, out);
        return kExitUsage;
    } catch (const IncompleteRun& e) {
        err << "error: incomplete run: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return is_usage_error(e) ? kExitUsage : kExitFailure;
    }
}

}  // namespace readctl::cli
