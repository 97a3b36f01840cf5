#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twoclass/bootstrap_validation.hpp"
#include "twoclass/csv_io.hpp"
#include "twoclass/fit.hpp"
#include "twoclass/series_analysis.hpp"

namespace twoclass {

using Json = nlohmann::ordered_json;

// Each command writes its files into out_dir (created if needed) after all
// computation is done, and returns the report it wrote as report.json.
// Errors from ingestion or fitting are rethrown with the dataset path prefixed.

struct FitCommand {
  DatasetSpec dataset;
  FitConfig fit;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
};

struct FitOutcome {
  IngestResult data;
  FitResult fit;
  Json report;
};

/// report.json, ccdf_points.csv, model_curve.csv, markers.csv, trace.csv.
FitOutcome cmd_fit(const FitCommand& command);

struct BootstrapCommand {
  DatasetSpec dataset;
  std::optional<std::string> stratify_by;  // one summary per category when set
  ValidationConfig validation;
  std::filesystem::path out_dir = "out";
};

struct BootstrapOutcome {
  std::vector<std::pair<std::string, BootstrapResult>> strata;  // name is empty when unstratified
  Json report;
};

/// report.json and replicas.csv.
BootstrapOutcome cmd_bootstrap(const BootstrapCommand& command);

struct SeriesCommand {
  std::vector<std::pair<int, DatasetSpec>> years;
  std::filesystem::path deflators;
  int reference_year = 0;
  SeriesConfig series;
  std::size_t correlation_draws = 1000;
  std::filesystem::path out_dir = "out";
};

struct SeriesOutcome {
  IndicatorSeries series;
  Json report;
};

/// report.json, series.csv, correlations.csv and plot_*.csv. Needs two or more
/// years.
SeriesOutcome cmd_series(const SeriesCommand& command);

struct SynthCommand {
  TwoClassParams params;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::filesystem::path output;
};

/// Writes n model draws as a one-column CSV. Throws std::invalid_argument for
/// n == 0 or invalid parameters, std::runtime_error for an unwritable path.
void cmd_synth(const SynthCommand& command);

Json to_json(const FitConfig& config);
Json to_json(const IndicatorSummary& summary);

/// Log-spaced points, both ends included; n >= 2.
std::vector<double> log_space(double lo, double hi, std::size_t n);

}  // namespace twoclass
