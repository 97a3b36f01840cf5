#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twoclass/fit.hpp"

namespace twoclass {

struct BootstrapPair {
  IncomeSample train;  // N draws with replacement
  IncomeSample test;   // observations never drawn
  std::uint64_t seed;  // seed that produced this pair (after any redraw)
};

/// Resamples by observation index. An out-of-bag set with fewer than two
/// observations is redrawn with seed + 1. Needs N >= 3 (with N = 2 the
/// out-of-bag set can never hold two observations).
BootstrapPair bootstrap_pair(const IncomeSample& sample, std::uint64_t seed);

/// Fixed-proportion baseline: T is the sample mean, m_c = C^-1(lambda0), alpha
/// minimizes the tail RMSLE over class points at or above m_c.
struct BaselineFit {
  double lambda0;
  double temperature;
  double alpha;
  double crossover;
  double train_rmsle;
  std::optional<double> test_rmsle;

  CcdfCurve curve() const { return {temperature, crossover, lambda0, alpha}; }
};

/// Throws std::invalid_argument unless 0 < lambda0 < 1, std::domain_error when
/// fewer than 10 class points lie at or above the crossover.
BaselineFit fixed_proportion_fit(const FitContext& train, double lambda0,
                                 const FitContext* test = nullptr);

/// Golden-section minimizer on [lo, hi].
template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double tolerance = 1e-6);

enum class Indicator : std::size_t {
  kCrossover,
  kLambda,
  kTemperature,
  kAlpha,
  kGini,
  kTrainRmsle,
  kTestRmsle,
};
inline constexpr std::size_t kIndicatorCount = 7;
std::string_view indicator_name(Indicator indicator);

struct ReplicaResult {
  std::size_t index;
  std::uint64_t seed;
  bool ok;
  std::string failure;
  SearchPoint point;
  std::array<double, kIndicatorCount> indicators;  // indexed by Indicator
  double loss;
  std::optional<BaselineFit> baseline;

  double operator[](Indicator i) const { return indicators[static_cast<std::size_t>(i)]; }
};

struct IndicatorSummary {
  double mean;
  double sd;
  double ci_lo;
  double ci_hi;
  double cv;
};

/// mean, sample sd, 2.5/97.5 percentiles and sd/mean. Empty input gives NaNs.
IndicatorSummary summarize(std::span<const double> values);

/// Linear interpolation between order statistics at h = (n - 1) q.
double percentile(std::span<const double> values, double q);

struct BootstrapSummary {
  std::size_t requested;
  std::size_t effective;  // replicas that produced a fit
  std::array<IndicatorSummary, kIndicatorCount> indicators;
  std::optional<IndicatorSummary> baseline_train_rmsle;
  std::optional<IndicatorSummary> baseline_test_rmsle;

  const IndicatorSummary& operator[](Indicator i) const { return indicators[static_cast<std::size_t>(i)]; }
};

struct ValidationConfig {
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::optional<double> baseline_lambda = 0.05;
  FitConfig fit;
};

struct BootstrapResult {
  std::vector<ReplicaResult> replicas;
  BootstrapSummary summary;
};

/// Replica r uses seed derive_seed(config.seed, r); replicas run concurrently.
/// Replicas whose fit fails are kept in the table with ok == false and
/// excluded from the summary.
BootstrapResult run_validation(const IncomeSample& sample, const ValidationConfig& config);

BootstrapSummary summarize_replicas(std::span<const ReplicaResult> replicas);

/// Replica table as comma-delimited text, one row per replica.
void write_replica_table(std::ostream& out, std::span<const ReplicaResult> replicas,
                         std::string_view stratum = {});

// ---------------------------------------------------------------------------

template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double tolerance) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  // Endpoints are candidates too when the minimum sits on the boundary.
  double best = (a + b) / 2.0, fbest = f(best);
  if (const double flo = f(lo); flo < fbest) best = lo, fbest = flo;
  if (const double fhi = f(hi); fhi < fbest) best = hi;
  return best;
}

}  // namespace twoclass
