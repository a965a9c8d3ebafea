#include "readctl/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "readctl/errors.hpp"

namespace readctl {

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) {
            out += ", ";
        }
        out += '"' + n + '"';
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view data, const CsvOptions& options) {
    if (data.starts_with("\xEF\xBB\xBF")) {
        data.remove_prefix(3);
    }
    const char delim = options.delimiter;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;     // inside quotes
    bool was_quoted = false; // current field started with a quote
    bool row_open = false;
    std::size_t record = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_open = false;
        ++record;
    };

    std::size_t i = 0;
    while (i < data.size()) {
        const char c = data[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < data.size() && data[i] != delim && data[i] != '\n' && data[i] != '\r') {
                    throw MalformedRow(record, "unexpected character after closing quote");
                }
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field.empty() || was_quoted) {
                throw MalformedRow(record, "quote inside unquoted field");
            }
            quoted = true;
            was_quoted = true;
            row_open = true;
            ++i;
            continue;
        }
        if (c == delim) {
            end_field();
            row_open = true;
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
                ++i;
            }
            ++i;
            if (row_open || !field.empty()) {
                end_row();
            }
            continue;
        }
        field += c;
        row_open = true;
        ++i;
    }
    if (quoted) {
        throw MalformedRow(record, "unterminated quoted field");
    }
    if (row_open || !field.empty()) {
        end_row();
    }
    return rows;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields, char delimiter) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) {
            out << delimiter;
        }
        first = false;
        const char specials[] = {'"', '\r', '\n', delimiter, '\0'};
        const bool needs_quotes = f.find_first_of(specials) != std::string::npos;
        if (!needs_quotes) {
            out << f;
            continue;
        }
        out << '"';
        for (char c : f) {
            if (c == '"') {
                out << '"';
            }
            out << c;
        }
        out << '"';
    }
    out << "\r\n";
}

Corpus parse_corpus(std::string_view csv_data, const LoadOptions& options) {
    const auto rows = parse_csv(csv_data, CsvOptions{options.delimiter});
    if (rows.empty()) {
        throw MissingColumn("column \"" + options.text_column + "\" not found: file has no header");
    }
    const auto& header = rows.front();
    auto column = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw MissingColumn("column \"" + name + "\" not found; available columns: " + join(header));
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t text_col = column(options.text_column);
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    const std::size_t id_col = options.id_column.empty() ? kNone : column(options.id_column);

    Corpus corpus;
    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw MalformedRow(r + 1, "expected " + std::to_string(header.size()) + " fields, found " +
                                          std::to_string(row.size()));
        }
        if (is_blank(row[text_col])) {
            ++corpus.skipped_empty;
            continue;
        }
        CorpusEntry e;
        e.source_id = id_col != kNone ? row[id_col] : std::to_string(r);
        e.text = row[text_col];
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != text_col && c != id_col) {
                e.extra[header[c]] = row[c];
            }
        }
        if (!seen.insert(e.source_id).second) {
            throw DuplicateSourceId("duplicate source id \"" + e.source_id + "\" at row " + std::to_string(r + 1));
        }
        corpus.entries.push_back(std::move(e));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        std::vector<std::filesystem::path> files;
        for (const auto& de : std::filesystem::directory_iterator(path)) {
            if (de.is_regular_file() && de.path().extension() == ".txt") {
                files.push_back(de.path());
            }
        }
        std::sort(files.begin(), files.end());
        Corpus corpus;
        for (const auto& f : files) {
            std::string text = read_file(f);
            if (is_blank(text)) {
                ++corpus.skipped_empty;
                continue;
            }
            corpus.entries.push_back(CorpusEntry{f.stem().string(), std::move(text), {}});
        }
        return corpus;
    }
    if (!std::filesystem::exists(path, ec)) {
        throw StorageError("corpus not found: " + path.string());
    }
    return parse_corpus(read_file(path), options);
}

void write_corpus(std::ostream& out, std::span<const CorpusEntry> entries, const LoadOptions& options) {
    const std::string id_name = options.id_column.empty() ? "id" : options.id_column;
    std::vector<std::string> header{id_name, options.text_column};
    std::set<std::string> extra;
    for (const auto& e : entries) {
        for (const auto& [k, v] : e.extra) {
            extra.insert(k);
        }
    }
    header.insert(header.end(), extra.begin(), extra.end());
    write_csv_row(out, header, options.delimiter);
    for (const auto& e : entries) {
        std::vector<std::string> row{e.source_id, e.text};
        for (const auto& k : extra) {
            const auto it = e.extra.find(k);
            row.push_back(it == e.extra.end() ? std::string{} : it->second);
        }
        write_csv_row(out, row, options.delimiter);
    }
}

std::size_t count_paragraphs(std::string_view text) {
    std::size_t blocks = 0;
    bool in_block = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        if (is_blank(line)) {
            in_block = false;
        } else if (!in_block) {
            in_block = true;
            ++blocks;
        }
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    return std::max<std::size_t>(blocks, 1);
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("mean_std: no values");
    }
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / n)};
}

CorpusStats corpus_stats(std::span<const CorpusEntry> entries, const SyllableLexicon* lexicon, unsigned workers) {
    if (entries.empty()) {
        throw std::invalid_argument("corpus_stats: empty corpus");
    }
    const std::size_t n = entries.size();
    std::vector<double> words(n), sentences(n), paragraphs(n), scores(n);
    std::vector<char> scored(n, 0);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            paragraphs[i] = static_cast<double>(count_paragraphs(entries[i].text));
            try {
                const auto a = fres(entries[i].text, lexicon);
                words[i] = static_cast<double>(a.n_words);
                sentences[i] = static_cast<double>(a.n_sentences);
                scores[i] = a.fres;
                scored[i] = 1;
            } catch (const EmptyText&) {
                words[i] = 0.0;
                sentences[i] = 0.0;
            }
        }
    };
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t b = 0; b < n; b += chunk) {
            pool.emplace_back(work, b, std::min(n, b + chunk));
        }
    }

    CorpusStats s;
    s.entries = n;
    s.words = mean_std(words);
    s.sentences = mean_std(sentences);
    s.paragraphs = mean_std(paragraphs);
    std::vector<double> fr;
    for (std::size_t i = 0; i < n; ++i) {
        if (scored[i]) {
            fr.push_back(scores[i]);
        }
    }
    if (!fr.empty()) {
        s.fres = mean_std(fr);
    }
    return s;
}

std::size_t Histogram::total() const noexcept {
    std::size_t t = 0;
    for (const auto& b : bins) {
        t += b.count;
    }
    return t;
}

Histogram histogram(std::span<const double> values, double bin_width, std::optional<double> origin) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw std::invalid_argument("histogram: bin width must be positive");
    }
    Histogram h;
    h.bin_width = bin_width;
    if (values.empty()) {
        return h;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    double start = origin.value_or(std::floor(lo / bin_width) * bin_width);
    if (start > lo) {
        start -= std::ceil((start - lo) / bin_width) * bin_width;
    }
    auto index = [&](double v) {
        auto k = static_cast<std::size_t>(std::floor((v - start) / bin_width));
        // guard against rounding putting v just past its bin edge
        while (k > 0 && start + static_cast<double>(k) * bin_width > v) {
            --k;
        }
        while (start + static_cast<double>(k + 1) * bin_width <= v) {
            ++k;
        }
        return k;
    };
    const std::size_t nbins = index(hi) + 1;
    h.bins.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        h.bins[k].lower = start + static_cast<double>(k) * bin_width;
        h.bins[k].upper = start + static_cast<double>(k + 1) * bin_width;
    }
    for (double v : values) {
        ++h.bins[index(v)].count;
    }
    return h;
}

Histogram fres_histogram(std::span<const CorpusEntry> entries, double bin_width, std::optional<double> origin,
                         const SyllableLexicon* lexicon) {
    std::vector<double> values;
    values.reserve(entries.size());
    std::size_t unscored = 0;
    for (const auto& e : entries) {
        try {
            values.push_back(fres(e.text, lexicon).fres);
        } catch (const EmptyText&) {
            ++unscored;
        }
    }
    Histogram h = histogram(values, bin_width, origin);
    h.unscored = unscored;
    return h;
}

}  // namespace readctl
