#include "twoclass/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "twoclass/random.hpp"

namespace twoclass {

namespace {

constexpr std::size_t kCurvePointsPerBranch = 500;

const char* const kRegionFormula =
    "region RMSLE = sqrt(mean over the region's class points of (ln C_emp - ln C_model)^2); "
    "points with income >= m_c belong to the Pareto region; "
    "total^2 = (n_exp * exp^2 + n_pareto * pareto^2) / (n_exp + n_pareto)";

template <typename F>
auto with_context(const std::string& where, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("{}: {}", where, e.what()));
  } catch (const std::domain_error& e) {
    throw std::domain_error(fmt::format("{}: {}", where, e.what()));
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", where, e.what()));
  }
}

std::string num(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string(); }

Json optional_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path.string()));
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

Json dataset_json(const DatasetSpec& spec) {
  Json filters = Json::array();
  for (const auto& f : spec.filters) filters.push_back({{"column", f.column}, {"values", f.values}});
  return {{"path", spec.path.generic_string()}, {"income_column", spec.income_column}, {"filters", filters}};
}

Json counts_json(const IngestCounts& c) {
  return {{"rows", c.rows},
          {"kept", c.kept},
          {"filtered_out", c.filtered_out},
          {"dropped_missing", c.dropped_missing},
          {"dropped_nonpositive", c.dropped_nonpositive},
          {"dropped_unparseable", c.dropped_unparseable}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_space needs n >= 2 and 0 < lo <= hi");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

Json to_json(const FitConfig& c) {
  return {{"k", c.k},
          {"p_lo", c.p_lo},
          {"p_hi", c.p_hi},
          {"alpha_lo", c.alpha_lo},
          {"alpha_hi", c.alpha_hi},
          {"t_lo_factor", c.t_lo_factor},
          {"t_hi_factor", c.t_hi_factor},
          {"candidates", c.n_candidates},
          {"iterations", c.max_iters},
          {"informants", c.informants},
          {"c1", c.c1},
          {"c2", c.c2},
          {"w_start", c.w_start},
          {"w_end", c.w_end},
          {"refine_every", c.refine_every},
          {"refine_max_steps", c.refine_max_steps},
          {"candidate_refine_rounds", c.candidate_refine_rounds},
          {"candidate_refine_steps", c.candidate_refine_steps}};
}

Json to_json(const IndicatorSummary& s) {
  return {{"mean", optional_number(s.mean)},
          {"sd", optional_number(s.sd)},
          {"ci_lo", optional_number(s.ci_lo)},
          {"ci_hi", optional_number(s.ci_hi)},
          {"cv", optional_number(s.cv)}};
}

FitOutcome cmd_fit(const FitCommand& command) {
  const std::string where = command.dataset.path.string();
  IngestResult data = with_context(where, [&] { return ingest(command.dataset); });
  const FitContext ctx = with_context(where, [&] { return FitContext(data.sample, command.fit.k); });
  FitResult fit = with_context(where, [&] { return fit_two_class(ctx, command.fit, command.seed); });
  if (!fit.ok()) throw std::runtime_error(fmt::format("{}: optimizer found no non-degenerate crossover", where));

  const CcdfCurve curve = CcdfCurve::from_params(fit.params);
  const double mc = fit.crossover;

  Json report;
  report["command"] = "fit";
  report["dataset"] = dataset_json(command.dataset);
  report["ingest"] = counts_json(data.counts);
  report["seed"] = command.seed;
  report["config"] = to_json(command.fit);
  report["config"]["effective_k"] = ctx.k();
  report["parameters"] = {{"top_percentage", fit.params.lambda},
                          {"temperature", fit.params.temperature},
                          {"pareto_index", fit.params.alpha},
                          {"crossover_income", mc},
                          {"search_point",
                           {{"p", fit.point.p}, {"alpha", fit.point.alpha}, {"temperature", fit.point.temperature}}}};
  report["gini"] = {{"theoretical", optional_number(fit.theoretical_gini)}, {"empirical", fit.empirical_gini}};
  report["loss"] = {{"rmsle", fit.loss.rmsle},
                    {"l1", fit.loss.l1},
                    {"l2", fit.loss.l2},
                    {"total", fit.loss.total},
                    {"p_clamped", fit.loss.clamped}};
  report["region_rmsle"] = {{"formula", kRegionFormula},
                            {"exponential", optional_number(fit.regions.exponential)},
                            {"pareto", optional_number(fit.regions.pareto)},
                            {"total", fit.regions.total},
                            {"exponential_points", fit.regions.exponential_points},
                            {"pareto_points", fit.regions.pareto_points}};
  report["optimizer"] = {{"iterations", fit.trace.size()},
                         {"evaluations", fit.evaluations},
                         {"first_best_loss", fit.trace.empty() ? Json(nullptr) : Json(fit.trace.front().best_loss)},
                         {"final_best_loss", fit.loss.total}};
  report["files"] = {"ccdf_points.csv", "model_curve.csv", "markers.csv", "trace.csv"};

  std::ostringstream points;
  points << "income,ccdf\n";
  for (double m : ctx.classes().points) points << num(m) << ',' << num(ctx.ccdf()(m)) << '\n';

  std::ostringstream model;
  model << "branch,income,ccdf\n";
  const double lo = std::min(data.sample.min(), mc / 10.0);
  const double hi = std::max(data.sample.max(), mc * 10.0);
  for (double m : log_space(lo, mc, kCurvePointsPerBranch)) model << "exponential," << num(m) << ',' << num(curve(m)) << '\n';
  for (double m : log_space(mc, hi, kCurvePointsPerBranch)) model << "pareto," << num(m) << ',' << num(curve(m)) << '\n';

  std::ostringstream markers;
  markers << "marker,income\n"
          << "temperature," << num(fit.params.temperature) << '\n'
          << "crossover_income," << num(mc) << '\n';

  std::ostringstream trace;
  write_trace(trace, fit.trace);

  prepare_dir(command.out_dir);
  write_file(command.out_dir / "ccdf_points.csv", points.str());
  write_file(command.out_dir / "model_curve.csv", model.str());
  write_file(command.out_dir / "markers.csv", markers.str());
  write_file(command.out_dir / "trace.csv", trace.str());
  write_file(command.out_dir / "report.json", dump(report));
  return {std::move(data), std::move(fit), std::move(report)};
}

BootstrapOutcome cmd_bootstrap(const BootstrapCommand& command) {
  if (command.validation.replicas < 2) throw std::invalid_argument("bootstrap needs at least 2 replicas");
  const std::string where = command.dataset.path.string();

  std::vector<std::pair<std::string, IngestResult>> inputs;
  if (command.stratify_by) {
    auto strata = with_context(where, [&] { return ingest_strata(command.dataset, *command.stratify_by); });
    for (auto& [name, data] : strata) inputs.emplace_back(name, std::move(data));
  } else {
    inputs.emplace_back(std::string(), with_context(where, [&] { return ingest(command.dataset); }));
  }

  BootstrapOutcome outcome;
  Json summaries = Json::array();
  std::ostringstream table;
  bool first = true;
  for (auto& [name, data] : inputs) {
    const std::string label = name.empty() ? where : fmt::format("{} [{}={}]", where, *command.stratify_by, name);
    BootstrapResult result = with_context(label, [&] { return run_validation(data.sample, command.validation); });

    Json s;
    s["stratum"] = command.stratify_by ? Json(name) : Json(nullptr);
    s["ingest"] = counts_json(data.counts);
    s["replicas_requested"] = result.summary.requested;
    s["replicas_effective"] = result.summary.effective;
    Json indicators;
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      indicators[std::string(indicator_name(static_cast<Indicator>(i)))] = to_json(result.summary.indicators[i]);
    }
    s["indicators"] = indicators;
    if (command.validation.baseline_lambda) {
      s["baseline"] = {{"top_percentage", *command.validation.baseline_lambda},
                       {"train_rmsle", result.summary.baseline_train_rmsle
                                           ? to_json(*result.summary.baseline_train_rmsle)
                                           : Json(nullptr)},
                       {"test_rmsle", result.summary.baseline_test_rmsle
                                          ? to_json(*result.summary.baseline_test_rmsle)
                                          : Json(nullptr)}};
    }
    summaries.push_back(std::move(s));

    std::ostringstream part;
    write_replica_table(part, result.replicas, command.stratify_by ? std::string_view(name) : std::string_view());
    std::string text = part.str();
    if (!first) text.erase(0, text.find('\n') + 1);  // header once
    table << text;
    first = false;
    outcome.strata.emplace_back(name, std::move(result));
  }

  Json report;
  report["command"] = "bootstrap";
  report["dataset"] = dataset_json(command.dataset);
  report["stratify_by"] = command.stratify_by ? Json(*command.stratify_by) : Json(nullptr);
  report["seed"] = command.validation.seed;
  report["config"] = {{"replicas", command.validation.replicas},
                      {"threads", command.validation.threads},
                      {"baseline_top_percentage", command.validation.baseline_lambda
                                                      ? Json(*command.validation.baseline_lambda)
                                                      : Json(nullptr)},
                      {"ci", "percentile 2.5/97.5, linear interpolation between order statistics"},
                      {"fit", to_json(command.validation.fit)}};
  report["summaries"] = std::move(summaries);
  report["files"] = {"replicas.csv"};

  prepare_dir(command.out_dir);
  write_file(command.out_dir / "replicas.csv", table.str());
  write_file(command.out_dir / "report.json", dump(report));
  outcome.report = std::move(report);
  return outcome;
}

namespace {

struct PairSpec {
  const char* name;
  const char* x_name;
  const char* y_name;
  double YearIndicators::*x;
  double YearIndicators::*y;
};

constexpr PairSpec kPairs[] = {
    {"pareto_index_vs_top_percentage", "top_percentage", "pareto_index", &YearIndicators::lambda,
     &YearIndicators::alpha},
    {"gini_empirical_vs_theoretical", "gini_theoretical", "gini_empirical", &YearIndicators::gini_theoretical,
     &YearIndicators::gini_empirical},
};

}  // namespace

SeriesOutcome cmd_series(const SeriesCommand& command) {
  if (command.years.size() < 2) throw std::invalid_argument("series needs at least two years");
  const auto deflators = with_context(command.deflators.string(), [&] { return read_deflators(command.deflators); });

  std::vector<YearSample> samples;
  Json datasets = Json::array();
  auto sorted = command.years;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [year, spec] : sorted) {
    IngestResult data = with_context(spec.path.string(), [&] { return ingest(spec); });
    Json d = dataset_json(spec);
    d["year"] = year;
    d["ingest"] = counts_json(data.counts);
    datasets.push_back(std::move(d));
    samples.push_back({year, std::move(data.sample)});
  }
  IndicatorSeries series = build_series(std::move(samples), deflators, command.reference_year, command.series);

  Json years = Json::array();
  for (const auto& y : series.years) {
    years.push_back({{"year", y.year},
                     {"top_percentage", optional_number(y.lambda)},
                     {"temperature", optional_number(y.temperature)},
                     {"temperature_deflated", optional_number(y.temperature_deflated)},
                     {"pareto_index", optional_number(y.alpha)},
                     {"crossover_income", optional_number(y.crossover)},
                     {"crossover_income_deflated", optional_number(y.crossover_deflated)},
                     {"gini_theoretical", optional_number(y.gini_theoretical)},
                     {"gini_empirical", optional_number(y.gini_empirical)},
                     {"rmsle", optional_number(y.rmsle)},
                     {"loss", optional_number(y.loss)},
                     {"deflator_ratio", y.deflator_ratio}});
  }

  Json correlations = Json::array();
  std::ostringstream corr_csv;
  corr_csv << "pair,x,y,n,rho,p_value,rho_uncertainty,slope,slope_se,intercept,intercept_se,residual_se,"
              "slope_p_value,error\n";
  std::vector<std::pair<std::string, std::string>> plots;
  for (std::size_t pi = 0; pi < std::size(kPairs); ++pi) {
    const PairSpec& pair = kPairs[pi];
    std::vector<double> xs, ys;
    std::vector<int> labels;
    for (const auto& y : series.years) {
      if (std::isfinite(y.*pair.x) && std::isfinite(y.*pair.y)) {
        xs.push_back(y.*pair.x);
        ys.push_back(y.*pair.y);
        labels.push_back(y.year);
      }
    }
    Json entry = {{"pair", pair.name}, {"x", pair.x_name}, {"y", pair.y_name}, {"n", xs.size()}};
    try {
      const Correlation c = pearson(xs, ys, derive_seed(command.series.seed, 0x5e71e5 + pi), command.correlation_draws);
      const AffineFit f = affine_regression(xs, ys);
      entry["pearson"] = {{"rho", c.rho}, {"p_value", c.p_value}, {"uncertainty", optional_number(c.uncertainty)}};
      entry["regression"] = {{"slope", f.slope},
                             {"slope_se", f.slope_se},
                             {"intercept", f.intercept},
                             {"intercept_se", f.intercept_se},
                             {"residual_se", f.residual_se},
                             {"p_value", optional_number(f.p_value)}};
      corr_csv << pair.name << ',' << pair.x_name << ',' << pair.y_name << ',' << xs.size() << ',' << num(c.rho) << ','
               << num(c.p_value) << ',' << num(c.uncertainty) << ',' << num(f.slope) << ',' << num(f.slope_se) << ','
               << num(f.intercept) << ',' << num(f.intercept_se) << ',' << num(f.residual_se) << ','
               << num(f.p_value) << ",\n";
    } catch (const std::invalid_argument& e) {
      entry["error"] = e.what();
      corr_csv << pair.name << ',' << pair.x_name << ',' << pair.y_name << ',' << xs.size() << ",,,,,,,,,,\""
               << e.what() << "\"\n";
    }
    correlations.push_back(std::move(entry));

    std::ostringstream plot;
    plot << "year," << pair.x_name << ',' << pair.y_name << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) plot << labels[i] << ',' << num(xs[i]) << ',' << num(ys[i]) << '\n';
    plots.emplace_back(fmt::format("plot_{}.csv", pair.name), plot.str());
  }

  std::ostringstream temps;
  temps << "year,temperature,temperature_deflated,crossover_income,crossover_income_deflated\n";
  std::ostringstream ginis;
  ginis << "year,gini_theoretical,gini_empirical\n";
  std::ostringstream params;
  params << "year,top_percentage,pareto_index\n";
  for (const auto& y : series.years) {
    temps << y.year << ',' << num(y.temperature) << ',' << num(y.temperature_deflated) << ',' << num(y.crossover)
          << ',' << num(y.crossover_deflated) << '\n';
    ginis << y.year << ',' << num(y.gini_theoretical) << ',' << num(y.gini_empirical) << '\n';
    params << y.year << ',' << num(y.lambda) << ',' << num(y.alpha) << '\n';
  }
  plots.emplace_back("plot_temperature.csv", temps.str());
  plots.emplace_back("plot_gini.csv", ginis.str());
  plots.emplace_back("plot_parameters.csv", params.str());

  Json files = {"series.csv", "correlations.csv"};
  for (const auto& [name, text] : plots) files.push_back(name);

  Json report;
  report["command"] = "series";
  report["datasets"] = std::move(datasets);
  report["deflators"] = command.deflators.generic_string();
  report["reference_year"] = command.reference_year;
  report["seed"] = command.series.seed;
  report["config"] = {{"threads", command.series.threads},
                      {"correlation_draws", command.correlation_draws},
                      {"fit", to_json(command.series.fit)}};
  report["series"] = std::move(years);
  report["correlations"] = std::move(correlations);
  report["files"] = std::move(files);

  std::ostringstream table;
  write_series_table(table, series);

  prepare_dir(command.out_dir);
  write_file(command.out_dir / "series.csv", table.str());
  write_file(command.out_dir / "correlations.csv", corr_csv.str());
  for (const auto& [name, text] : plots) write_file(command.out_dir / name, text);
  write_file(command.out_dir / "report.json", dump(report));
  return {std::move(series), std::move(report)};
}

void cmd_synth(const SynthCommand& command) {
  if (command.n == 0) throw std::invalid_argument("synth needs n >= 1");
  command.params.validate();
  const std::vector<double> incomes = draw_incomes(command.params, command.n, command.seed);
  write_income_csv(command.output, incomes);
}

}  // namespace twoclass
