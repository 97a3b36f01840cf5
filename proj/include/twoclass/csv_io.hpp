#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "twoclass/empirical_ccdf.hpp"

namespace twoclass {

/// Keep only rows whose `column` holds one of `values`.
struct StratumFilter {
  std::string column;
  std::vector<std::string> values;
};

struct DatasetSpec {
  std::filesystem::path path;
  std::string income_column = "income";
  std::vector<StratumFilter> filters;
};

struct IngestCounts {
  std::size_t rows = 0;
  std::size_t kept = 0;
  std::size_t filtered_out = 0;
  std::size_t dropped_missing = 0;      // empty or NA
  std::size_t dropped_nonpositive = 0;  // zero or negative income
  std::size_t dropped_unparseable = 0;  // not a finite number, or wrong field count
};

struct IngestResult {
  IncomeSample sample;
  IngestCounts counts;
};

/// Parsed comma-delimited table with a header row. Fields may be quoted
/// ("" escapes a quote); rows whose field count differs from the header are
/// kept with their actual width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws std::invalid_argument when the column is absent.
  std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
std::vector<std::string> split_csv_line(const std::string& line);

/// Loads incomes, dropping missing, non-positive and unparseable entries and
/// applying stratum filters. Throws std::runtime_error for unreadable files,
/// std::invalid_argument for absent columns or categories, and
/// std::invalid_argument ("insufficient data") when fewer than two rows remain.
IngestResult ingest(const DatasetSpec& spec);

/// One sample per category of `column` (after spec's own filters), ordered by
/// category name. Rows with a blank category are skipped.
std::map<std::string, IngestResult> ingest_strata(const DatasetSpec& spec, const std::string& column);

/// Single-column CSV ("income" header) with shortest round-trip formatting.
/// Throws std::runtime_error when the file cannot be written.
void write_income_csv(const std::filesystem::path& path, std::span<const double> incomes);

/// Two-column (year, index) price-index table with a header row.
std::map<int, double> read_deflators(const std::filesystem::path& path);

}  // namespace twoclass
