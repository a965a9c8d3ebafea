#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "readctl/dataset.hpp"
#include "readctl/scoring.hpp"

namespace readctl {

/// Mean and population std of the individual-scale metrics, natural units
/// (rho in [-1, 1], accuracy in [0, 1]). Exports scale rho and accuracy by 100.
struct IndividualSummary {
    std::size_t n = 0;
    MeanStd rho;
    MeanStd rmse;
    MeanStd accuracy;
};

/// Throws DegenerateInput on an empty list.
IndividualSummary individual_summary(std::span<const ExampleScore> examples);

struct PopulationRow {
    std::string label;  // "Source" or the target level
    int target_level = 0;
    std::optional<PopulationFit> fit;
    std::string undefined_reason;
};

/// The identity "Source" row followed by one row per target.
struct PopulationSummary {
    std::vector<PopulationRow> rows;
};

PopulationSummary population_summary(const RunScores& scores);

struct ScatterPoint {
    double bin_center = 0.0;
    double mean_generated = 0.0;
    std::size_t count = 0;
};

struct ScatterSeries {
    int target_level = 0;
    std::vector<ScatterPoint> points;
};

/// Mean generated FRES per source-FRES bin [k*w, (k+1)*w), one series per
/// target. Bins with fewer than `min_count` pairs are left out.
std::vector<ScatterSeries> binned_scatter(std::span<const PairScore> pairs, std::span<const int> targets,
                                          double bin_width = 5.0, std::size_t min_count = 10);

enum class HeatVariable { GeneratedFres, Wer, SemanticF1, LengthChange };

std::string to_string(HeatVariable v);
/// "generated-FRES", "wer", "semantic-f1" or "length-change". Throws UnknownVariable.
HeatVariable heat_variable_from_string(const std::string& s);

enum class LengthUnit { Percent, Words };

struct HeatCell {
    std::optional<double> mean;
    std::size_t count = 0;
};

/// cells[source class][target class], both in class-label order.
struct HeatmapGrid {
    HeatVariable variable = HeatVariable::GeneratedFres;
    std::array<int, 8> labels = kTargetLevels;
    std::array<std::array<HeatCell, 8>, 8> cells{};
    /// Pairs whose source FRES fell outside [0, 100] and were put in the
    /// nearest class.
    std::size_t clamped = 0;
};

/// Pairs without a semantic score are skipped for SemanticF1.
HeatmapGrid heatmap(std::span<const PairScore> pairs, HeatVariable variable, LengthUnit unit = LengthUnit::Percent);

struct ReportOptions {
    double bin_width = 5.0;
    std::size_t min_count = 10;
    bool charts = false;
    LengthUnit length_unit = LengthUnit::Percent;
};

/// Writes summaries, scatter series, heatmaps, per-example and per-pair
/// tables into `dir`, plus charts/*.svg when asked. Numbers are printed at
/// fixed precision so identical inputs give identical files. Returns the
/// written paths in order. Throws StorageError.
std::vector<std::filesystem::path> export_report(const RunScores& scores, const std::filesystem::path& dir,
                                                 const ReportOptions& options = {});

/// Fixed 4-decimal rendering used by every export; never prints "-0.0000".
std::string format_number(double v);

// Display-scaled JSON (rho, accuracy and pcc times 100) and its inverse.
nlohmann::json to_display_json(const IndividualSummary& s);
IndividualSummary individual_summary_from_display_json(const nlohmann::json& j);
nlohmann::json to_display_json(const PopulationSummary& s);
PopulationSummary population_summary_from_display_json(const nlohmann::json& j);

}  // namespace readctl
