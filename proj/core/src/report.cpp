#include "readctl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "readctl/errors.hpp"

namespace readctl {

IndividualSummary individual_summary(std::span<const ExampleScore> examples) {
    if (examples.empty()) {
        throw DegenerateInput("no scored examples");
    }
    std::vector<double> rho, err, acc;
    for (const auto& e : examples) {
        rho.push_back(e.spearman_rho);
        err.push_back(e.rmse);
        acc.push_back(e.accuracy);
    }
    return {examples.size(), mean_std(rho), mean_std(err), mean_std(acc)};
}

PopulationSummary population_summary(const RunScores& scores) {
    PopulationSummary s;
    PopulationRow source{"Source", 0, PopulationFit{0, 1.0, 1.0, 0.0, 1.0, scores.examples.size()}, {}};
    s.rows.push_back(std::move(source));
    for (const auto& f : scores.fits) {
        s.rows.push_back({std::to_string(f.target_level), f.target_level, f.fit, f.undefined_reason});
    }
    return s;
}

namespace {

// summation in sorted order keeps means independent of record order
double stable_mean(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

}  // namespace

std::vector<ScatterSeries> binned_scatter(std::span<const PairScore> pairs, std::span<const int> targets,
                                          double bin_width, std::size_t min_count) {
    if (!(bin_width > 0.0)) {
        throw ConfigError("bin width must be positive");
    }
    std::vector<ScatterSeries> out;
    for (int t : targets) {
        std::map<long long, std::vector<double>> bins;
        for (const auto& p : pairs) {
            if (p.target_level == t) {
                bins[static_cast<long long>(std::floor(p.source_fres / bin_width))].push_back(p.generated_fres);
            }
        }
        ScatterSeries s{t, {}};
        for (auto& [k, ys] : bins) {
            if (ys.size() < min_count) {
                continue;
            }
            const std::size_t n = ys.size();
            s.points.push_back({(static_cast<double>(k) + 0.5) * bin_width, stable_mean(std::move(ys)), n});
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string to_string(HeatVariable v) {
    switch (v) {
        case HeatVariable::GeneratedFres:
            return "generated-FRES";
        case HeatVariable::Wer:
            return "wer";
        case HeatVariable::SemanticF1:
            return "semantic-f1";
        case HeatVariable::LengthChange:
            return "length-change";
    }
    return "generated-FRES";
}

HeatVariable heat_variable_from_string(const std::string& s) {
    for (auto v : {HeatVariable::GeneratedFres, HeatVariable::Wer, HeatVariable::SemanticF1, HeatVariable::LengthChange}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw UnknownVariable("unknown heatmap variable \"" + s +
                          "\" (expected generated-FRES, wer, semantic-f1 or length-change)");
}

namespace {

std::size_t class_index(int label) {
    const auto it = std::find(kTargetLevels.begin(), kTargetLevels.end(), label);
    return static_cast<std::size_t>(it - kTargetLevels.begin());
}

}  // namespace

HeatmapGrid heatmap(std::span<const PairScore> pairs, HeatVariable variable, LengthUnit unit) {
    HeatmapGrid g;
    g.variable = variable;
    std::array<std::array<std::vector<double>, 8>, 8> values;
    for (const auto& p : pairs) {
        double v = 0.0;
        switch (variable) {
            case HeatVariable::GeneratedFres:
                v = p.generated_fres;
                break;
            case HeatVariable::Wer:
                v = p.metrics.self_wer;
                break;
            case HeatVariable::SemanticF1:
                if (!p.metrics.semantic) {
                    continue;
                }
                v = p.metrics.semantic->f1;
                break;
            case HeatVariable::LengthChange:
                v = unit == LengthUnit::Percent ? p.metrics.length_change_pct
                                                : static_cast<double>(p.generated_words - p.source_words);
                break;
        }
        const auto cls = classify(p.source_fres);
        if (!cls) {
            ++g.clamped;
        }
        const std::size_t row = class_index(cls ? cls->label : classify_clamped(p.source_fres).label);
        const std::size_t col = class_index(classify_clamped(p.target_level).label);
        values[row][col].push_back(v);
    }
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            auto& cell = g.cells[r][c];
            cell.count = values[r][c].size();
            if (cell.count > 0) {
                cell.mean = stable_mean(std::move(values[r][c]));
            }
        }
    }
    return g;
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") {
        s = "0.0000";
    }
    return s;
}

namespace {

// rounds to the printed precision so JSON and CSV agree
double fixed(double v) {
    const double r = std::round(v * 1e4) / 1e4;
    return r == 0.0 ? 0.0 : r;
}

nlohmann::json mean_std_json(const MeanStd& m, double scale) {
    return {{"mean", fixed(m.mean * scale)}, {"std", fixed(m.std * scale)}};
}

MeanStd mean_std_back(const nlohmann::json& j, double scale) {
    return {j.at("mean").get<double>() / scale, j.at("std").get<double>() / scale};
}

}  // namespace

nlohmann::json to_display_json(const IndividualSummary& s) {
    return {{"n", s.n},
            {"rho_x100", mean_std_json(s.rho, 100.0)},
            {"rmse", mean_std_json(s.rmse, 1.0)},
            {"accuracy_x100", mean_std_json(s.accuracy, 100.0)}};
}

IndividualSummary individual_summary_from_display_json(const nlohmann::json& j) {
    return {j.at("n").get<std::size_t>(), mean_std_back(j.at("rho_x100"), 100.0), mean_std_back(j.at("rmse"), 1.0),
            mean_std_back(j.at("accuracy_x100"), 100.0)};
}

nlohmann::json to_display_json(const PopulationSummary& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows) {
        nlohmann::json row{{"row", r.label}, {"target_level", r.target_level}};
        if (r.fit) {
            row["pcc_x100"] = fixed(r.fit->pcc * 100.0);
            row["slope"] = fixed(r.fit->slope);
            row["intercept"] = fixed(r.fit->intercept);
            row["r_squared"] = fixed(r.fit->r_squared);
            row["n"] = r.fit->n;
        } else {
            row["undefined"] = r.undefined_reason.empty() ? std::string("degenerate input") : r.undefined_reason;
        }
        rows.push_back(std::move(row));
    }
    return {{"rows", rows}};
}

PopulationSummary population_summary_from_display_json(const nlohmann::json& j) {
    PopulationSummary s;
    for (const auto& row : j.at("rows")) {
        PopulationRow r;
        r.label = row.at("row").get<std::string>();
        r.target_level = row.at("target_level").get<int>();
        if (row.contains("pcc_x100")) {
            r.fit = PopulationFit{r.target_level,
                                  row.at("pcc_x100").get<double>() / 100.0,
                                  row.at("slope").get<double>(),
                                  row.at("intercept").get<double>(),
                                  row.at("r_squared").get<double>(),
                                  row.at("n").get<std::size_t>()};
        } else {
            r.undefined_reason = row.value("undefined", std::string{});
        }
        s.rows.push_back(std::move(r));
    }
    return s;
}

// --- export -----------------------------------------------------------------------

namespace {

class Writer {
public:
    explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void file(const std::string& name, const std::string& contents) {
        const auto path = dir_ / name;
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out) {
            throw StorageError("cannot write " + path.string());
        }
        written.push_back(path);
    }

    std::vector<std::filesystem::path> written;

private:
    std::filesystem::path dir_;
};

std::string csv(const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (const auto& r : rows) write_csv_row(out, r);
    return out.str();
}

std::string level_name(int level) {
    return std::to_string(level);
}

std::string heat_label(const HeatmapGrid& g, std::size_t i) {
    return std::to_string(g.labels[i]);
}

// --- svg ---

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string scatter_svg(const std::vector<ScatterSeries>& series) {
    constexpr double W = 520, H = 420, L = 50, T = 20, PW = 440, PH = 340;
    auto sx = [&](double v) { return format_number(L + std::clamp(v, -10.0, 120.0) / 100.0 * PW); };
    auto sy = [&](double v) { return format_number(T + PH - std::clamp(v, -10.0, 120.0) / 100.0 * PH); };
    static const char* kColors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                    "#66a61e", "#e6ab02", "#a6761d", "#666666"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << PW << "\" height=\"" << PH
      << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int v = 0; v <= 100; v += 20) {
        o << "<text x=\"" << sx(v) << "\" y=\"" << (T + PH + 16) << "\" font-size=\"11\" text-anchor=\"middle\">" << v
          << "</text>\n";
        o << "<text x=\"" << (L - 6) << "\" y=\"" << sy(v) << "\" font-size=\"11\" text-anchor=\"end\">" << v
          << "</text>\n";
    }
    o << "<text x=\"" << (L + PW / 2) << "\" y=\"" << (H - 4)
      << "\" font-size=\"12\" text-anchor=\"middle\">source FRES</text>\n";
    o << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(100) << "\" y2=\"" << sy(100)
      << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kColors[i % 8];
        if (!s.points.empty()) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& p : s.points) o << sx(p.bin_center) << "," << sy(p.mean_generated) << " ";
            o << "\"/>\n";
        }
        o << "<text x=\"" << (L + PW + 8) << "\" y=\"" << (T + 14 + 14 * static_cast<double>(i))
          << "\" font-size=\"11\" fill=\"" << color << "\">" << s.target_level << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string heatmap_svg(const HeatmapGrid& g) {
    constexpr double C = 48, L = 50, T = 30;
    double lo = 0, hi = 0;
    bool any = false;
    for (const auto& row : g.cells) {
        for (const auto& c : row) {
            if (!c.mean) continue;
            lo = any ? std::min(lo, *c.mean) : *c.mean;
            hi = any ? std::max(hi, *c.mean) : *c.mean;
            any = true;
        }
    }
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (L + 8 * C + 10) << "\" height=\"" << (T + 8 * C + 30)
      << "\">\n";
    o << "<text x=\"" << L << "\" y=\"16\" font-size=\"12\">" << svg_escape(to_string(g.variable))
      << " (rows: source class, columns: target)</text>\n";
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            const auto& cell = g.cells[r][c];
            const double x = L + C * static_cast<double>(c), y = T + C * static_cast<double>(r);
            std::string fill = "#eeeeee";
            if (cell.mean) {
                const double t = hi > lo ? (*cell.mean - lo) / (hi - lo) : 0.5;
                char buf[16];
                std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 - 200 * t),
                              static_cast<int>(255 - 120 * t), 255);
                fill = buf;
            }
            o << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << C << "\" height=\"" << C << "\" fill=\""
              << fill << "\" stroke=\"#fff\"/>\n";
            if (cell.mean) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", *cell.mean);
                o << "<text x=\"" << (x + C / 2) << "\" y=\"" << (y + C / 2 + 4)
                  << "\" font-size=\"10\" text-anchor=\"middle\">" << buf << "</text>\n";
            }
        }
        o << "<text x=\"" << (L - 6) << "\" y=\"" << (T + C * static_cast<double>(r) + C / 2 + 4)
          << "\" font-size=\"11\" text-anchor=\"end\">" << g.labels[r] << "</text>\n";
        o << "<text x=\"" << (L + C * static_cast<double>(r) + C / 2) << "\" y=\"" << (T + 8 * C + 16)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << g.labels[r] << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace

std::vector<std::filesystem::path> export_report(const RunScores& scores, const std::filesystem::path& dir,
                                                 const ReportOptions& options) {
    Writer w(dir);
    const auto ind = individual_summary(scores.examples);
    w.file("summary_individual.csv",
           csv({{"metric", "mean", "std", "n"},
                {"rho_x100", format_number(ind.rho.mean * 100), format_number(ind.rho.std * 100), std::to_string(ind.n)},
                {"rmse", format_number(ind.rmse.mean), format_number(ind.rmse.std), std::to_string(ind.n)},
                {"accuracy_x100", format_number(ind.accuracy.mean * 100), format_number(ind.accuracy.std * 100),
                 std::to_string(ind.n)}}));
    w.file("summary_individual.json", to_display_json(ind).dump(2) + "\n");

    const auto pop = population_summary(scores);
    std::vector<std::vector<std::string>> prows{{"row", "pcc_x100", "slope", "intercept", "r_squared", "n", "status"}};
    for (const auto& r : pop.rows) {
        if (r.fit) {
            prows.push_back({r.label, format_number(r.fit->pcc * 100), format_number(r.fit->slope),
                             format_number(r.fit->intercept), format_number(r.fit->r_squared),
                             std::to_string(r.fit->n), "ok"});
        } else {
            prows.push_back({r.label, "", "", "", "", "", "undefined: " + r.undefined_reason});
        }
    }
    w.file("summary_population.csv", csv(prows));
    w.file("summary_population.json", to_display_json(pop).dump(2) + "\n");

    const auto scatter = binned_scatter(scores.pairs, scores.targets, options.bin_width, options.min_count);
    for (const auto& s : scatter) {
        std::vector<std::vector<std::string>> rows{{"bin_center", "mean_generated_fres", "count"}};
        for (const auto& p : s.points) {
            rows.push_back({format_number(p.bin_center), format_number(p.mean_generated), std::to_string(p.count)});
        }
        w.file("scatter_" + level_name(s.target_level) + ".csv", csv(rows));
    }

    std::vector<HeatVariable> vars{HeatVariable::GeneratedFres, HeatVariable::Wer, HeatVariable::LengthChange};
    if (scores.semantic) {
        vars.insert(vars.begin() + 2, HeatVariable::SemanticF1);
    }
    std::vector<HeatmapGrid> grids;
    for (auto v : vars) {
        const auto g = heatmap(scores.pairs, v, options.length_unit);
        std::vector<std::vector<std::string>> means{{"source\\target"}}, counts{{"source\\target"}};
        for (std::size_t c = 0; c < 8; ++c) {
            means[0].push_back(heat_label(g, c));
            counts[0].push_back(heat_label(g, c));
        }
        for (std::size_t r = 0; r < 8; ++r) {
            std::vector<std::string> m{heat_label(g, r)}, n{heat_label(g, r)};
            for (std::size_t c = 0; c < 8; ++c) {
                m.push_back(g.cells[r][c].mean ? format_number(*g.cells[r][c].mean) : "");
                n.push_back(std::to_string(g.cells[r][c].count));
            }
            means.push_back(std::move(m));
            counts.push_back(std::move(n));
        }
        counts.push_back({"clamped", std::to_string(g.clamped)});
        w.file("heatmap_" + to_string(v) + ".csv", csv(means));
        w.file("heatmap_" + to_string(v) + "_counts.csv", csv(counts));
        grids.push_back(g);
    }

    std::vector<std::vector<std::string>> ex{{"source_id", "source_fres"}};
    for (int t : scores.targets) ex[0].push_back("fres_" + level_name(t));
    for (const char* h : {"rho", "rmse", "accuracy", "empty_generations"}) ex[0].push_back(h);
    for (const auto& e : scores.examples) {
        std::vector<std::string> row{e.source_id, format_number(e.source_fres)};
        for (int t : scores.targets) row.push_back(format_number(e.generated_fres.at(t)));
        row.push_back(format_number(e.spearman_rho));
        row.push_back(format_number(e.rmse));
        row.push_back(format_number(e.accuracy));
        row.push_back(std::to_string(e.empty_generations));
        ex.push_back(std::move(row));
    }
    w.file("examples.csv", csv(ex));

    std::vector<std::vector<std::string>> pr{{"source_id", "target", "source_fres", "generated_fres", "wer_pct",
                                              "sem_precision", "sem_recall", "sem_f1", "length_change_pct",
                                              "length_change_words", "fallback"}};
    for (const auto& p : scores.pairs) {
        const auto& s = p.metrics.semantic;
        pr.push_back({p.source_id, std::to_string(p.target_level), format_number(p.source_fres),
                      format_number(p.generated_fres), format_number(p.metrics.self_wer * 100),
                      s ? format_number(s->precision) : "", s ? format_number(s->recall) : "",
                      s ? format_number(s->f1) : "", format_number(p.metrics.length_change_pct),
                      std::to_string(p.generated_words - p.source_words), p.fallback ? "true" : "false"});
    }
    w.file("pairs.csv", csv(pr));

    if (options.charts) {
        w.file("charts/scatter.svg", scatter_svg(scatter));
        for (const auto& g : grids) {
            w.file("charts/heatmap_" + to_string(g.variable) + ".svg", heatmap_svg(g));
        }
    }
    return w.written;
}

}  // namespace readctl
