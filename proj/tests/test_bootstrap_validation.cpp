#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "twoclass/bootstrap_validation.hpp"

using namespace twoclass;

namespace {

FitConfig quick_fit() {
  FitConfig c;
  c.k = 2000;
  c.max_iters = 60;
  c.n_candidates = 20;
  return c;
}

}  // namespace

TEST(BootstrapPair, TrainSizeAndPartition) {
  // Continuous draws are distinct, so values identify observations.
  const auto sample = sample_model({0.1, 1800.0, 1.8}, 3000, 2);
  const BootstrapPair pair = bootstrap_pair(sample, 17);
  EXPECT_EQ(pair.train.size(), sample.size());
  const std::set<double> train(pair.train.descending().begin(), pair.train.descending().end());
  const std::set<double> test(pair.test.descending().begin(), pair.test.descending().end());
  EXPECT_EQ(test.size(), pair.test.size());  // out-of-bag observations appear once
  for (double v : sample.descending()) EXPECT_NE(train.contains(v), test.contains(v)) << v;
  EXPECT_EQ(train.size() + test.size(), sample.size());
}

TEST(BootstrapPair, DeterministicInSeed) {
  const auto sample = sample_model({0.1, 1800.0, 1.8}, 500, 2);
  const auto a = bootstrap_pair(sample, 5);
  const auto b = bootstrap_pair(sample, 5);
  EXPECT_TRUE(std::ranges::equal(a.train.descending(), b.train.descending()));
  EXPECT_TRUE(std::ranges::equal(a.test.descending(), b.test.descending()));
  EXPECT_FALSE(std::ranges::equal(a.train.descending(), bootstrap_pair(sample, 6).train.descending()));
}

TEST(BootstrapPair, DistinctFractionIsOneMinusInverseE) {
  const auto sample = sample_model({0.1, 1800.0, 1.8}, 10000, 3);
  double total = 0.0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto pair = bootstrap_pair(sample, derive_seed(1, r));
    const std::set<double> distinct(pair.train.descending().begin(), pair.train.descending().end());
    total += static_cast<double>(distinct.size()) / 10000.0;
  }
  EXPECT_NEAR(total / 100.0, 1.0 - std::exp(-1.0), 0.01);
}

TEST(BootstrapPair, TinySamples) {
  EXPECT_THROW(bootstrap_pair(IncomeSample::from_values({1.0, 2.0}), 1), std::invalid_argument);
  // With N = 3 most seeds leave fewer than two out-of-bag points; the redraw
  // advances the seed until one does.
  const auto pair = bootstrap_pair(IncomeSample::from_values({1.0, 2.0, 3.0}), 1);
  EXPECT_EQ(pair.test.size(), 2u);
  EXPECT_GE(pair.seed, 1u);
}

TEST(Percentile, LinearInterpolationBetweenOrderStatistics) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(percentile(v, 0.0), 1.0);
  EXPECT_EQ(percentile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile(v, 0.025), 1.0 + 0.075);
  EXPECT_DOUBLE_EQ(percentile(v, 0.975), 3.0 + 0.925);
  EXPECT_TRUE(std::isnan(percentile(std::vector<double>{}, 0.5)));
}

TEST(Summarize, MatchesDirectComputation) {
  const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const IndicatorSummary s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_DOUBLE_EQ(s.sd, std::sqrt(32.0 / 7.0));
  EXPECT_DOUBLE_EQ(s.cv, s.sd / 5.0);
  EXPECT_DOUBLE_EQ(s.ci_lo, percentile(v, 0.025));
  EXPECT_DOUBLE_EQ(s.ci_hi, percentile(v, 0.975));
  EXPECT_LE(s.ci_lo, s.mean);
  EXPECT_GE(s.ci_hi, s.mean);
}

TEST(FixedProportionFit, Validation) {
  const FitContext ctx(sample_model({0.1, 1800.0, 1.8}, 5000, 1), 1000);
  EXPECT_THROW(fixed_proportion_fit(ctx, 0.0), std::invalid_argument);
  EXPECT_THROW(fixed_proportion_fit(ctx, 1.0), std::invalid_argument);
  // 0.5% of 999 loss points leaves fewer than ten above the crossover.
  EXPECT_THROW(fixed_proportion_fit(ctx, 0.005), std::domain_error);
}

TEST(FixedProportionFit, CrossoverAndAlphaOnMatchingData) {
  const TwoClassParams truth{0.05, 1800.0, 2.0};
  const FitContext ctx(sample_model(truth, 100000, 4), 10000);
  const BaselineFit b = fixed_proportion_fit(ctx, 0.05);
  EXPECT_EQ(b.lambda0, 0.05);
  EXPECT_EQ(b.curve().tail_level, 0.05);
  EXPECT_EQ(b.temperature, ctx.mean());
  EXPECT_EQ(b.crossover, ctx.ccdf().inverse(0.05).income);
  EXPECT_NEAR(b.crossover / (truth.temperature * std::log(20.0)), 1.0, 0.01);
  EXPECT_NEAR(b.alpha, truth.alpha, 0.1);
  EXPECT_FALSE(b.test_rmsle.has_value());
}

TEST(FixedProportionFit, CloseToOptimalWhenItsAssumptionsHold) {
  // lambda0 matches the data and the body temperature is the generating one:
  // the two-part curve is then the true model up to the fitted alpha.
  const TwoClassParams truth{0.05, 1800.0, 2.0};
  const FitContext ctx(sample_model(truth, 100000, 4), 10000);
  BaselineFit b = fixed_proportion_fit(ctx, 0.05);
  b.temperature = truth.temperature;
  const FitResult opt = fit_two_class(ctx, FitConfig{}, 1);
  EXPECT_LT(std::abs(curve_rmsle(ctx, b.curve()) - opt.loss.rmsle), 0.01);
}

TEST(FixedProportionFit, WorseThanOptimalWhenLambdaDiffers) {
  const FitContext ctx(sample_model({0.1, 1800.0, 1.8}, 100000, 6), 10000);
  const BaselineFit b = fixed_proportion_fit(ctx, 0.05);
  const FitResult opt = fit_two_class(ctx, FitConfig{}, 1);
  EXPECT_GT(b.train_rmsle, opt.loss.rmsle);
}

TEST(GoldenSection, FindsInteriorAndBoundaryMinima) {
  EXPECT_NEAR(golden_section_minimize([](double x) { return (x - 1.7) * (x - 1.7); }, 1.0, 3.0, 1e-8), 1.7, 1e-6);
  EXPECT_EQ(golden_section_minimize([](double x) { return x; }, 1.0, 3.0), 1.0);
  EXPECT_EQ(golden_section_minimize([](double x) { return -x; }, 1.0, 3.0), 3.0);
}

TEST(RunValidation, SummaryMatchesReplicasAndThreadCountIsIrrelevant) {
  const auto sample = sample_model({0.1, 1800.0, 1.8}, 20000, 8);
  ValidationConfig cfg;
  cfg.replicas = 6;
  cfg.seed = 3;
  cfg.fit = quick_fit();
  cfg.threads = 1;
  const BootstrapResult one = run_validation(sample, cfg);
  cfg.threads = 3;
  const BootstrapResult three = run_validation(sample, cfg);

  std::ostringstream a, b;
  write_replica_table(a, one.replicas);
  write_replica_table(b, three.replicas);
  EXPECT_EQ(a.str(), b.str());

  ASSERT_EQ(one.replicas.size(), 6u);
  EXPECT_EQ(one.summary.requested, 6u);
  std::vector<double> gini;
  for (const auto& r : one.replicas) {
    EXPECT_EQ(r.seed, derive_seed(3, r.index));
    if (!r.ok) continue;
    gini.push_back(r[Indicator::kGini]);
    EXPECT_EQ(r[Indicator::kLambda], std::exp(-r[Indicator::kCrossover] / r[Indicator::kTemperature]));
    ASSERT_TRUE(r.baseline.has_value());
    EXPECT_EQ(r.baseline->lambda0, 0.05);
    EXPECT_GE(r.baseline->train_rmsle, r[Indicator::kTrainRmsle]);
  }
  EXPECT_EQ(one.summary.effective, gini.size());
  const IndicatorSummary direct = summarize(gini);
  const IndicatorSummary& reported = one.summary[Indicator::kGini];
  EXPECT_EQ(reported.mean, direct.mean);
  EXPECT_EQ(reported.sd, direct.sd);
  EXPECT_EQ(reported.ci_lo, direct.ci_lo);
  EXPECT_EQ(reported.ci_hi, direct.ci_hi);
  EXPECT_EQ(reported.cv, direct.cv);
}

TEST(RunValidation, MinimalReplicaCount) {
  ValidationConfig cfg;
  cfg.replicas = 2;
  cfg.fit = quick_fit();
  const auto result = run_validation(sample_model({0.1, 1800.0, 1.8}, 5000, 1), cfg);
  EXPECT_EQ(result.summary.requested, 2u);
  EXPECT_EQ(result.summary.effective, 2u);
  cfg.replicas = 1;
  EXPECT_THROW(run_validation(sample_model({0.1, 1800.0, 1.8}, 5000, 1), cfg), std::invalid_argument);
}

TEST(RunValidation, AllEqualSampleHasNoEffectiveReplicas) {
  ValidationConfig cfg;
  cfg.replicas = 4;
  cfg.fit = quick_fit();
  const auto result = run_validation(IncomeSample::from_values(std::vector<double>(500, 1000.0)), cfg);
  EXPECT_EQ(result.summary.effective, 0u);
  for (const auto& r : result.replicas) {
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.failure.empty());
  }
  EXPECT_TRUE(std::isnan(result.summary[Indicator::kAlpha].mean));
}

TEST(ReplicaTable, OneRowPerReplicaWithStratumColumn) {
  ValidationConfig cfg;
  cfg.replicas = 3;
  cfg.fit = quick_fit();
  const auto result = run_validation(sample_model({0.1, 1800.0, 1.8}, 5000, 1), cfg);
  std::ostringstream out;
  write_replica_table(out, result.replicas, "woman");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("stratum,replica,seed,ok,p,crossover_income,top_percentage,temperature,pareto_index,gini,"
                       "train_rmsle,test_rmsle,loss,",
                       0),
            0u);
  const auto columns = std::count(line.begin(), line.end(), ',');
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("woman,", 0), 0u);
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}
