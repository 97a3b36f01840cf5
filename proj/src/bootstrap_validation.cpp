#include "twoclass/bootstrap_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "twoclass/parallel.hpp"
#include "twoclass/random.hpp"

namespace twoclass {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinTailPoints = 10;

std::string number(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string(); }

ReplicaResult run_replica(const IncomeSample& sample, const ValidationConfig& config, std::size_t index) {
  ReplicaResult out{};
  out.index = index;
  out.seed = derive_seed(config.seed, index);
  out.ok = false;
  out.indicators.fill(kNaN);
  out.loss = kNaN;
  try {
    BootstrapPair pair = bootstrap_pair(sample, out.seed);
    const FitContext train(std::move(pair.train), config.fit.k);
    const FitContext test(std::move(pair.test), config.fit.k);
    const FitResult fit = fit_two_class(train, config.fit, derive_seed(pair.seed, 1));
    out.point = fit.point;
    out.loss = fit.loss.total;
    if (!fit.ok()) {
      out.failure = "optimizer found no non-degenerate crossover";
      return out;
    }
    const CcdfCurve curve{fit.params.temperature, fit.crossover, fit.params.lambda, fit.params.alpha};
    out.indicators = {fit.crossover,         fit.params.lambda, fit.params.temperature,
                      fit.params.alpha,      fit.theoretical_gini, fit.loss.rmsle,
                      curve_rmsle(test, curve)};
    out.ok = true;
    if (config.baseline_lambda) {
      try {
        out.baseline = fixed_proportion_fit(train, *config.baseline_lambda, &test);
      } catch (const std::exception&) {
        out.baseline.reset();
      }
    }
  } catch (const std::exception& e) {
    out.ok = false;
    out.failure = e.what();
  }
  return out;
}

}  // namespace

BootstrapPair bootstrap_pair(const IncomeSample& sample, std::uint64_t seed) {
  auto values = sample.descending();
  const std::size_t n = values.size();
  if (n < 3) throw std::invalid_argument("insufficient data: an out-of-bag split needs at least three incomes");
  for (;; ++seed) {
    Rng rng(seed);
    std::vector<double> train(n);
    std::vector<char> drawn(n, 0);
    for (double& v : train) {
      const std::size_t i = uniform_index(rng, n);
      drawn[i] = 1;
      v = values[i];
    }
    std::vector<double> test;
    for (std::size_t i = 0; i < n; ++i) {
      if (!drawn[i]) test.push_back(values[i]);
    }
    if (test.size() < 2) continue;
    return {IncomeSample::from_values(std::move(train)), IncomeSample::from_values(std::move(test)), seed};
  }
}

BaselineFit fixed_proportion_fit(const FitContext& train, double lambda0, const FitContext* test) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw std::invalid_argument("baseline proportion must lie in (0, 1)");
  BaselineFit out{};
  out.lambda0 = lambda0;
  out.temperature = train.mean();
  out.crossover = train.ccdf().inverse(lambda0).income;

  auto eta = train.grid_income();
  const auto first_tail =
      static_cast<std::size_t>(std::lower_bound(eta.begin(), eta.end(), out.crossover) - eta.begin());
  const std::size_t tail_points = eta.size() - first_tail;
  if (tail_points < kMinTailPoints) {
    throw std::domain_error(fmt::format("only {} class points above the baseline crossover", tail_points));
  }
  auto log_eta = train.grid_log_income().subspan(first_tail);
  auto log_c = train.grid_log_ccdf().subspan(first_tail);
  const double log_level = std::log(lambda0);
  const double log_mc = std::log(out.crossover);
  auto tail_rmsle = [&](double alpha) {
    double sum = 0.0;
    for (std::size_t i = 0; i < log_eta.size(); ++i) {
      const double r = log_c[i] - (log_level - alpha * (log_eta[i] - log_mc));
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(log_eta.size()));
  };
  out.alpha = golden_section_minimize(tail_rmsle, 1.0, 3.0, 1e-6);
  out.train_rmsle = curve_rmsle(train, out.curve());
  if (test) out.test_rmsle = curve_rmsle(*test, out.curve());
  return out;
}

std::string_view indicator_name(Indicator indicator) {
  switch (indicator) {
    case Indicator::kCrossover: return "crossover_income";
    case Indicator::kLambda: return "top_percentage";
    case Indicator::kTemperature: return "temperature";
    case Indicator::kAlpha: return "pareto_index";
    case Indicator::kGini: return "gini";
    case Indicator::kTrainRmsle: return "train_rmsle";
    case Indicator::kTestRmsle: return "test_rmsle";
  }
  return "unknown";
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) return kNaN;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

IndicatorSummary summarize(std::span<const double> values) {
  if (values.empty()) return {kNaN, kNaN, kNaN, kNaN, kNaN};
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : kNaN;
  return {mean, sd, percentile(values, 0.025), percentile(values, 0.975), sd / mean};
}

BootstrapSummary summarize_replicas(std::span<const ReplicaResult> replicas) {
  BootstrapSummary out{};
  out.requested = replicas.size();
  std::array<std::vector<double>, kIndicatorCount> columns;
  std::vector<double> base_train, base_test;
  for (const auto& r : replicas) {
    if (!r.ok) continue;
    ++out.effective;
    for (std::size_t i = 0; i < kIndicatorCount; ++i) columns[i].push_back(r.indicators[i]);
    if (r.baseline) {
      base_train.push_back(r.baseline->train_rmsle);
      if (r.baseline->test_rmsle) base_test.push_back(*r.baseline->test_rmsle);
    }
  }
  for (std::size_t i = 0; i < kIndicatorCount; ++i) out.indicators[i] = summarize(columns[i]);
  if (!base_train.empty()) out.baseline_train_rmsle = summarize(base_train);
  if (!base_test.empty()) out.baseline_test_rmsle = summarize(base_test);
  return out;
}

BootstrapResult run_validation(const IncomeSample& sample, const ValidationConfig& config) {
  if (config.replicas < 2) throw std::invalid_argument("bootstrap needs at least two replicas");
  BootstrapResult out;
  out.replicas.resize(config.replicas);
  parallel_for(config.replicas, config.threads,
               [&](std::size_t r) { out.replicas[r] = run_replica(sample, config, r); });
  out.summary = summarize_replicas(out.replicas);
  return out;
}

void write_replica_table(std::ostream& out, std::span<const ReplicaResult> replicas, std::string_view stratum) {
  if (!stratum.empty()) out << "stratum,";
  out << "replica,seed,ok,p";
  for (std::size_t i = 0; i < kIndicatorCount; ++i) out << ',' << indicator_name(static_cast<Indicator>(i));
  out << ",loss,baseline_crossover,baseline_temperature,baseline_alpha,baseline_train_rmsle,baseline_test_rmsle,"
         "failure\n";
  for (const auto& r : replicas) {
    if (!stratum.empty()) out << stratum << ',';
    out << r.index << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ',' << (r.ok ? number(r.point.p) : "");
    for (double v : r.indicators) out << ',' << number(v);
    out << ',' << number(r.loss);
    if (r.baseline) {
      out << ',' << number(r.baseline->crossover) << ',' << number(r.baseline->temperature) << ','
          << number(r.baseline->alpha) << ',' << number(r.baseline->train_rmsle) << ','
          << (r.baseline->test_rmsle ? number(*r.baseline->test_rmsle) : "");
    } else {
      out << ",,,,,";
    }
    out << ",\"" << r.failure << "\"\n";
  }
}

}  // namespace twoclass
