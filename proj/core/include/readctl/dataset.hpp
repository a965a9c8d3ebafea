#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readctl/textcore.hpp"

namespace readctl {

struct CorpusEntry {
    std::string source_id;
    std::string text;
    /// Other columns of the row, carried through verbatim.
    std::map<std::string, std::string> extra;

    bool operator==(const CorpusEntry&) const = default;
};

struct Corpus {
    std::vector<CorpusEntry> entries;
    std::size_t skipped_empty = 0;
};

struct CsvOptions {
    char delimiter = ',';
};

/// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
/// line breaks; CRLF and LF are both accepted and a leading UTF-8 BOM is
/// ignored. Throws MalformedRow on an unterminated quote or stray quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view data, const CsvOptions& options = {});

/// Quotes fields only when they need it.
void write_csv_row(std::ostream& out, std::span<const std::string> fields, char delimiter = ',');

struct LoadOptions {
    std::string text_column = "text";
    /// When empty, the 1-based data row number becomes the source id.
    std::string id_column;
    char delimiter = ',';
};

/// Loads a delimited file, or every `*.txt` file of a directory (sorted by
/// name, file stem as source id). Rows whose text is blank are skipped and
/// counted. Throws MissingColumn, MalformedRow, DuplicateSourceId or
/// StorageError.
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
Corpus parse_corpus(std::string_view csv_data, const LoadOptions& options = {});

/// Writes entries as CSV with columns id, text and the extra columns.
void write_corpus(std::ostream& out, std::span<const CorpusEntry> entries, const LoadOptions& options = {});

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

struct CorpusStats {
    std::size_t entries = 0;
    MeanStd words;
    MeanStd sentences;
    MeanStd paragraphs;
    MeanStd fres;
};

/// Blank-line separated blocks, at least 1.
std::size_t count_paragraphs(std::string_view text);

/// Population mean and standard deviation. Throws std::invalid_argument when
/// `values` is empty.
MeanStd mean_std(std::span<const double> values);

/// Throws std::invalid_argument on an empty corpus.
CorpusStats corpus_stats(std::span<const CorpusEntry> entries, const SyllableLexicon* lexicon = nullptr,
                         unsigned workers = 0);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

struct Histogram {
    double bin_width = 0.0;
    std::vector<HistogramBin> bins;
    /// Entries without word tokens are not binned.
    std::size_t unscored = 0;

    std::size_t total() const noexcept;
};

/// Fixed-width bins covering [min, max] of the entries' FRES. The first bin
/// starts at `origin`, or at floor(min / width) * width when unset.
Histogram fres_histogram(std::span<const CorpusEntry> entries, double bin_width,
                         std::optional<double> origin = std::nullopt, const SyllableLexicon* lexicon = nullptr);
Histogram histogram(std::span<const double> values, double bin_width, std::optional<double> origin = std::nullopt);

}  // namespace readctl
