#include "readctl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "readctl/errors.hpp"

namespace readctl {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[idx[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

struct Moments {
    double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
};

// two-pass centred sums
Moments moments(std::span<const double> xs, std::span<const double> ys) {
    Moments m;
    const auto n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.mx += xs[i];
        m.my += ys[i];
    }
    m.mx /= n;
    m.my /= n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - m.mx;
        const double dy = ys[i] - m.my;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

void check_pairs(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DegenerateInput("x and y differ in length");
    }
    if (xs.size() < 2) {
        throw DegenerateInput("at least two points are required");
    }
    if (is_constant(xs)) {
        throw DegenerateInput("x values are constant");
    }
    if (is_constant(ys)) {
        throw DegenerateInput("y values are constant");
    }
}

std::vector<double> values_of(const LevelSeries& s) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& [level, value] : s) {
        out.push_back(value);
    }
    return out;
}

std::vector<double> levels_of(const LevelSeries& s) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& [level, value] : s) {
        out.push_back(static_cast<double>(level));
    }
    return out;
}

double cosine(const Embedding& a, const Embedding& b, double na, double nb) {
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
    }
    return dot / (na * nb);
}

double norm(const Embedding& v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

}  // namespace

double spearman(std::span<const double> generated, std::span<const double> targets) {
    if (generated.size() != targets.size()) {
        throw std::invalid_argument("spearman: length mismatch");
    }
    if (generated.size() < 2) {
        throw std::invalid_argument("spearman: need at least two values");
    }
    if (is_constant(generated) || is_constant(targets)) {
        return 0.0;
    }
    const auto rg = average_ranks(generated);
    const auto rt = average_ranks(targets);
    const Moments m = moments(rg, rt);
    return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

double spearman(const LevelSeries& generated) {
    const auto v = values_of(generated);
    const auto t = levels_of(generated);
    return spearman(v, t);
}

double rmse(const LevelSeries& generated) {
    if (generated.empty()) {
        throw std::invalid_argument("rmse: empty series");
    }
    double sum = 0.0;
    for (const auto& [level, value] : generated) {
        const double d = value - level;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(generated.size()));
}

double accuracy(const LevelSeries& generated) {
    if (generated.empty()) {
        throw std::invalid_argument("accuracy: empty series");
    }
    std::size_t hits = 0;
    for (const auto& [level, value] : generated) {
        const auto c = classify(value);
        if (c && c->label == level) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(generated.size());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    check_pairs(xs, ys);
    const Moments m = moments(xs, ys);
    return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

PopulationFit ols_fit(std::span<const double> xs, std::span<const double> ys, int target_level) {
    check_pairs(xs, ys);
    const Moments m = moments(xs, ys);
    PopulationFit fit;
    fit.target_level = target_level;
    fit.n = xs.size();
    fit.pcc = std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
    fit.slope = m.sxy / m.sxx;
    fit.intercept = m.my - fit.slope * m.mx;
    // 1 - SS_res/SS_tot reduces to sxy^2 / (sxx syy) for the least-squares line
    fit.r_squared = fit.pcc * fit.pcc;
    return fit;
}

EditCounts align_words(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
    const std::size_t n = reference.size();
    const std::size_t m = hypothesis.size();
    std::vector<std::size_t> d((n + 1) * (m + 1));
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
    for (std::size_t i = 0; i <= n; ++i) {
        at(i, 0) = i;
    }
    for (std::size_t j = 0; j <= m; ++j) {
        at(0, j) = j;
    }
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t diag = at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
            at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
        }
    }

    EditCounts c;
    c.reference_length = n;
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0) {
            const bool same = reference[i - 1] == hypothesis[j - 1];
            if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
                if (!same) {
                    ++c.substitutions;
                }
                --i;
                --j;
                continue;
            }
        }
        if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            ++c.deletions;
            --i;
        } else {
            ++c.insertions;
            --j;
        }
    }
    return c;
}

double self_wer(std::span<const std::string> source_tokens, std::span<const std::string> generated_tokens) {
    if (source_tokens.empty()) {
        throw EmptyReference();
    }
    const EditCounts c = align_words(source_tokens, generated_tokens);
    return static_cast<double>(c.distance()) / static_cast<double>(c.reference_length);
}

SemanticScore semantic_score(std::span<const Embedding> source, std::span<const Embedding> generated) {
    if (source.empty()) {
        throw EmptySide("source has no token embeddings");
    }
    if (generated.empty()) {
        throw EmptySide("generated text has no token embeddings");
    }
    const std::size_t dim = source.front().size();
    auto check = [dim](const Embedding& e) {
        if (e.size() != dim) {
            throw DimensionMismatch("embedding dimension " + std::to_string(e.size()) + " != " +
                                    std::to_string(dim));
        }
    };
    std::for_each(source.begin(), source.end(), check);
    std::for_each(generated.begin(), generated.end(), check);

    std::vector<double> ns(source.size());
    std::vector<double> ng(generated.size());
    std::transform(source.begin(), source.end(), ns.begin(), norm);
    std::transform(generated.begin(), generated.end(), ng.begin(), norm);

    std::vector<double> best_src(source.size(), -std::numeric_limits<double>::infinity());
    std::vector<double> best_gen(generated.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < source.size(); ++i) {
        for (std::size_t j = 0; j < generated.size(); ++j) {
            const double c = cosine(source[i], generated[j], ns[i], ng[j]);
            best_src[i] = std::max(best_src[i], c);
            best_gen[j] = std::max(best_gen[j], c);
        }
    }
    SemanticScore s;
    s.recall = std::accumulate(best_src.begin(), best_src.end(), 0.0) / static_cast<double>(source.size());
    s.precision = std::accumulate(best_gen.begin(), best_gen.end(), 0.0) / static_cast<double>(generated.size());
    const double denom = s.precision + s.recall;
    s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
    return s;
}

double length_change(const TextAnalysis& source, const TextAnalysis& generated) {
    if (source.n_words == 0) {
        throw EmptyText();
    }
    const auto src = static_cast<double>(source.n_words);
    return 100.0 * (static_cast<double>(generated.n_words) - src) / src;
}

ExampleScore score_example(const std::string& source_id, const TextAnalysis& source,
                           std::span<const GenerationRecord> generations, std::span<const int> targets,
                           const SyllableLexicon* lexicon) {
    ExampleScore out;
    out.source_id = source_id;
    out.source_fres = source.fres;
    for (int level : targets) {
        const GenerationRecord* found = nullptr;
        for (const auto& g : generations) {
            if (g.target_level != level) {
                continue;
            }
            if (found) {
                throw std::invalid_argument("score_example: duplicate generation for level " +
                                            std::to_string(level) + " of " + source_id);
            }
            found = &g;
        }
        if (!found) {
            throw std::invalid_argument("score_example: no generation for level " + std::to_string(level) +
                                        " of " + source_id);
        }
        try {
            out.generated_fres[level] = fres(found->output_text, lexicon).fres;
        } catch (const EmptyText&) {
            out.generated_fres[level] = source.fres;
            ++out.empty_generations;
        }
    }
    if (out.generated_fres.size() != generations.size()) {
        throw std::invalid_argument("score_example: generation for an unexpected level in " + source_id);
    }
    out.spearman_rho = spearman(out.generated_fres);
    out.rmse = rmse(out.generated_fres);
    out.accuracy = accuracy(out.generated_fres);
    return out;
}

}  // namespace readctl
