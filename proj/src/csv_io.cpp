#include "twoclass/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

namespace twoclass {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool is_missing(const std::string& field) { return field.empty() || field == "NA" || field == "na"; }

std::optional<double> parse_double(const std::string& field) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct ColumnFilter {
  std::size_t index;
  std::set<std::string> values;
};

std::vector<ColumnFilter> resolve_filters(const CsvTable& table, const std::vector<StratumFilter>& filters) {
  std::vector<ColumnFilter> out;
  for (const auto& f : filters) {
    ColumnFilter cf{table.column_index(f.column), {f.values.begin(), f.values.end()}};
    std::set<std::string> present;
    for (const auto& row : table.rows) {
      if (cf.index < row.size()) present.insert(row[cf.index]);
    }
    for (const auto& v : cf.values) {
      if (!present.contains(v)) {
        throw std::invalid_argument(fmt::format("category '{}' does not occur in column '{}'", v, f.column));
      }
    }
    out.push_back(std::move(cf));
  }
  return out;
}

bool passes(const std::vector<std::string>& row, const std::vector<ColumnFilter>& filters) {
  for (const auto& f : filters) {
    if (f.index >= row.size() || !f.values.contains(row[f.index])) return false;
  }
  return true;
}

// Accumulates incomes of the rows passed to it.
struct IncomeCollector {
  std::size_t income_index;
  std::size_t width;
  std::vector<double> values;
  IngestCounts counts;

  void add(const std::vector<std::string>& row) {
    if (row.size() != width || income_index >= row.size()) {
      ++counts.dropped_unparseable;
      return;
    }
    const std::string& field = row[income_index];
    if (is_missing(field)) {
      ++counts.dropped_missing;
      return;
    }
    const auto v = parse_double(field);
    if (!v) {
      ++counts.dropped_unparseable;
      return;
    }
    if (*v <= 0.0) {
      ++counts.dropped_nonpositive;
      return;
    }
    values.push_back(*v);
    ++counts.kept;
  }

  IngestResult finish() && {
    if (values.size() < 2) {
      throw std::invalid_argument(fmt::format("insufficient data: {} usable incomes", values.size()));
    }
    return {IncomeSample::from_values(std::move(values)), counts};
  }
};

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument(fmt::format("column '{}' not found in header", name));
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? current : trim(current));
      current.clear();
      was_quoted = false;
    } else {
      current += c;
    }
  }
  fields.push_back(was_quoted ? current : trim(current));
  return fields;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      table.header = split_csv_line(line);
      have_header = true;
      continue;
    }
    if (trim(line).empty()) continue;
    table.rows.push_back(split_csv_line(line));
  }
  if (!have_header) throw std::invalid_argument(fmt::format("'{}' has no header row", path.string()));
  return table;
}

IngestResult ingest(const DatasetSpec& spec) {
  const CsvTable table = read_csv(spec.path);
  const auto filters = resolve_filters(table, spec.filters);
  IncomeCollector collector{table.column_index(spec.income_column), table.header.size(), {}, {}};
  for (const auto& row : table.rows) {
    ++collector.counts.rows;
    if (!passes(row, filters)) {
      ++collector.counts.filtered_out;
      continue;
    }
    collector.add(row);
  }
  return std::move(collector).finish();
}

std::map<std::string, IngestResult> ingest_strata(const DatasetSpec& spec, const std::string& column) {
  const CsvTable table = read_csv(spec.path);
  const auto filters = resolve_filters(table, spec.filters);
  const std::size_t income = table.column_index(spec.income_column);
  const std::size_t stratum = table.column_index(column);

  std::map<std::string, IncomeCollector> groups;
  for (const auto& row : table.rows) {
    if (stratum >= row.size() || row[stratum].empty() || !passes(row, filters)) continue;
    auto [it, inserted] = groups.try_emplace(row[stratum], IncomeCollector{income, table.header.size(), {}, {}});
    ++it->second.counts.rows;
    it->second.add(row);
  }
  std::map<std::string, IngestResult> out;
  for (auto& [name, collector] : groups) {
    try {
      out.emplace(name, std::move(collector).finish());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("stratum '{}': {}", name, e.what()));
    }
  }
  return out;
}

void write_income_csv(const std::filesystem::path& path, std::span<const double> incomes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << "income\n";
  for (double v : incomes) out << fmt::format("{}\n", v);
  if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path.string()));
}

std::map<int, double> read_deflators(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2) throw std::invalid_argument("deflator file needs year and index columns");
  std::map<int, double> out;
  for (const auto& row : table.rows) {
    if (row.size() < 2) throw std::invalid_argument("deflator row with fewer than two fields");
    int year = 0;
    const auto [ptr, ec] = std::from_chars(row[0].data(), row[0].data() + row[0].size(), year);
    const auto index = parse_double(row[1]);
    if (ec != std::errc() || ptr != row[0].data() + row[0].size() || !index || !(*index > 0.0)) {
      throw std::invalid_argument(fmt::format("bad deflator row '{},{}'", row[0], row[1]));
    }
    if (!out.emplace(year, *index).second) throw std::invalid_argument(fmt::format("duplicate deflator year {}", year));
  }
  return out;
}

}  // namespace twoclass
