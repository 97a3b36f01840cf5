// Command-line front end: fit, bootstrap, series, synth.

#include <charconv>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "twoclass/commands.hpp"

namespace {

using namespace twoclass;

void add_fit_options(CLI::App* app, FitConfig& fit) {
  app->add_option("--k", fit.k, "Number of income classes")->capture_default_str()->check(CLI::Range(2ul, 100000000ul));
  app->add_option("--p-lo", fit.p_lo, "Lower bound of the top-class fraction p")->capture_default_str();
  app->add_option("--p-hi", fit.p_hi, "Upper bound of p")->capture_default_str();
  app->add_option("--alpha-lo", fit.alpha_lo, "Lower bound of the Pareto index")->capture_default_str();
  app->add_option("--alpha-hi", fit.alpha_hi, "Upper bound of the Pareto index")->capture_default_str();
  app->add_option("--t-lo-factor", fit.t_lo_factor, "Lower temperature bound as a multiple of the sample mean")
      ->capture_default_str();
  app->add_option("--t-hi-factor", fit.t_hi_factor, "Upper temperature bound as a multiple of the sample mean")
      ->capture_default_str();
  app->add_option("--candidates", fit.n_candidates, "Swarm size")->capture_default_str();
  app->add_option("--iterations", fit.max_iters, "Swarm iterations")->capture_default_str();
  app->add_option("--informants", fit.informants, "Informants per particle")->capture_default_str();
  app->add_option("--c1", fit.c1, "Cognitive coefficient")->capture_default_str();
  app->add_option("--c2", fit.c2, "Social coefficient")->capture_default_str();
  app->add_option("--w-start", fit.w_start, "Initial inertia")->capture_default_str();
  app->add_option("--w-end", fit.w_end, "Final inertia")->capture_default_str();
  app->add_option("--refine-every", fit.refine_every, "Iterations between gradient refinements")
      ->capture_default_str();
  app->add_option("--refine-steps", fit.refine_max_steps, "Steps per refinement of the global best")
      ->capture_default_str();
  app->add_option("--candidate-refine-rounds", fit.candidate_refine_rounds,
                  "Refinement rounds that also polish every particle's best")
      ->capture_default_str();
  app->add_option("--candidate-refine-steps", fit.candidate_refine_steps, "Steps per particle polish")
      ->capture_default_str();
}

struct DatasetArgs {
  std::string path;
  std::string income_column = "income";
  std::vector<std::string> filters;  // column=value[,value...]
};

void add_dataset_options(CLI::App* app, DatasetArgs& args, bool with_path) {
  if (with_path) app->add_option("--data", args.path, "Input CSV with a header row")->required();
  app->add_option("--income-column", args.income_column, "Income column name")->capture_default_str();
  app->add_option("--filter", args.filters, "Keep rows with column=value[,value...]; repeatable");
}

std::vector<StratumFilter> parse_filters(const std::vector<std::string>& raw) {
  std::vector<StratumFilter> out;
  for (const auto& f : raw) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == f.size()) {
      throw std::invalid_argument(fmt::format("filter '{}' is not column=value", f));
    }
    StratumFilter filter{f.substr(0, eq), {}};
    std::string rest = f.substr(eq + 1);
    std::size_t start = 0;
    while (true) {
      const auto comma = rest.find(',', start);
      filter.values.push_back(rest.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    out.push_back(std::move(filter));
  }
  return out;
}

DatasetSpec to_spec(const DatasetArgs& args, const std::string& path) {
  return {path, args.income_column, parse_filters(args.filters)};
}

std::pair<int, std::string> parse_year(const std::string& raw) {
  const auto eq = raw.find('=');
  int year = 0;
  if (eq != std::string::npos) {
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + eq, year);
    if (ec == std::errc() && ptr == raw.data() + eq && eq + 1 < raw.size()) return {year, raw.substr(eq + 1)};
  }
  throw std::invalid_argument(fmt::format("year entry '{}' is not YEAR=path", raw));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-class (exponential + Pareto) income distribution fitting"};
  app.set_config("--config", "", "TOML/INI file; options of a command go in its [section]");
  app.require_subcommand(1);

  // fit
  FitCommand fit_cmd;
  DatasetArgs fit_data;
  std::string fit_out = "out";
  auto* fit = app.add_subcommand("fit", "Fit one dataset and write the report and plot data");
  add_dataset_options(fit, fit_data, true);
  add_fit_options(fit, fit_cmd.fit);
  fit->add_option("--seed", fit_cmd.seed, "Random seed")->capture_default_str();
  fit->add_option("--out", fit_out, "Output directory")->capture_default_str();

  // bootstrap
  BootstrapCommand boot_cmd;
  DatasetArgs boot_data;
  std::string boot_out = "out";
  std::string stratify;
  double baseline = 0.05;
  bool no_baseline = false;
  auto* boot = app.add_subcommand("bootstrap", "Out-of-bag bootstrap validation");
  add_dataset_options(boot, boot_data, true);
  add_fit_options(boot, boot_cmd.validation.fit);
  boot->add_option("--replicas,-R", boot_cmd.validation.replicas, "Bootstrap replicas")
      ->capture_default_str()
      ->check(CLI::Range(2ul, 10000000ul));
  boot->add_option("--seed", boot_cmd.validation.seed, "Master seed")->capture_default_str();
  boot->add_option("--threads", boot_cmd.validation.threads, "Worker threads (0 = all cores)")->capture_default_str();
  boot->add_option("--stratify-by", stratify, "Column whose categories get separate summaries");
  boot->add_option("--baseline-lambda", baseline, "Top-class fraction of the fixed-proportion baseline")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  boot->add_flag("--no-baseline", no_baseline, "Skip the fixed-proportion baseline");
  boot->add_option("--out", boot_out, "Output directory")->capture_default_str();

  // series
  SeriesCommand series_cmd;
  DatasetArgs series_data;
  std::vector<std::string> years;
  std::string deflators;
  std::string series_out = "out";
  auto* series = app.add_subcommand("series", "Fit yearly datasets and correlate the indicators");
  add_dataset_options(series, series_data, false);
  add_fit_options(series, series_cmd.series.fit);
  series->add_option("--year", years, "YEAR=path; repeat for every year")->required();
  series->add_option("--deflators", deflators, "CSV of year,index")->required();
  series->add_option("--reference-year", series_cmd.reference_year, "Currency year of deflated values")->required();
  series->add_option("--seed", series_cmd.series.seed, "Master seed")->capture_default_str();
  series->add_option("--threads", series_cmd.series.threads, "Worker threads (0 = all cores)")->capture_default_str();
  series->add_option("--correlation-draws", series_cmd.correlation_draws, "Bootstrap draws for rho uncertainty")
      ->capture_default_str();
  series->add_option("--out", series_out, "Output directory")->capture_default_str();

  // synth
  SynthCommand synth_cmd;
  synth_cmd.params = {0.1, 1800.0, 1.8};
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write draws from the model as a one-column CSV");
  synth->add_option("--lambda", synth_cmd.params.lambda, "Top-class fraction")->capture_default_str();
  synth->add_option("--temperature", synth_cmd.params.temperature, "Temperature T")->capture_default_str();
  synth->add_option("--alpha", synth_cmd.params.alpha, "Pareto index")->capture_default_str();
  synth->add_option("--n", synth_cmd.n, "Number of draws")->required();
  synth->add_option("--seed", synth_cmd.seed, "Random seed")->capture_default_str();
  synth->add_option("--output,-o", synth_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      fit_cmd.dataset = to_spec(fit_data, fit_data.path);
      fit_cmd.out_dir = fit_out;
      const FitOutcome r = cmd_fit(fit_cmd);
      fmt::print("lambda={} T={} alpha={} m_c={} loss={} -> {}\n", r.fit.params.lambda, r.fit.params.temperature,
                 r.fit.params.alpha, r.fit.crossover, r.fit.loss.total, (fit_cmd.out_dir / "report.json").string());
    } else if (*boot) {
      boot_cmd.dataset = to_spec(boot_data, boot_data.path);
      if (!stratify.empty()) boot_cmd.stratify_by = stratify;
      boot_cmd.validation.baseline_lambda = no_baseline ? std::nullopt : std::optional<double>(baseline);
      boot_cmd.out_dir = boot_out;
      const BootstrapOutcome r = cmd_bootstrap(boot_cmd);
      for (const auto& [name, result] : r.strata) {
        fmt::print("{}{}/{} replicas fitted\n", name.empty() ? "" : name + ": ", result.summary.effective,
                   result.summary.requested);
      }
      fmt::print("-> {}\n", (boot_cmd.out_dir / "report.json").string());
    } else if (*series) {
      for (const auto& y : years) {
        const auto [year, path] = parse_year(y);
        series_cmd.years.emplace_back(year, to_spec(series_data, path));
      }
      series_cmd.deflators = deflators;
      series_cmd.out_dir = series_out;
      const SeriesOutcome r = cmd_series(series_cmd);
      fmt::print("{} years -> {}\n", r.series.years.size(), (series_cmd.out_dir / "report.json").string());
    } else if (*synth) {
      synth_cmd.output = synth_out;
      cmd_synth(synth_cmd);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
