#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "twoclass/empirical_ccdf.hpp"
#include "twoclass/two_class_model.hpp"

namespace twoclass {

/// Loss assigned to evaluations that cannot be resolved (no data below the
/// crossover, overflow, non-finite terms).
inline constexpr double kSentinelLoss = 1e6;

/// Optimizer coordinates x = (p, alpha, T), p being the empirical CCDF value
/// at the crossover.
struct SearchPoint {
  double p = 0.1;
  double alpha = 2.0;
  double temperature = 1.0;

  std::array<double, 3> to_array() const { return {p, alpha, temperature}; }
  static SearchPoint from_span(std::span<const double> x);
};

/// Search cuboid. Temperature bounds are absolute here; see default_bounds.
struct SearchBounds {
  double p_lo = 1e-4;
  double p_hi = 0.2;
  double alpha_lo = 1.0;
  double alpha_hi = 3.0;
  double t_lo = 0.5;
  double t_hi = 2.0;

  bool contains(const SearchPoint& x) const;
  std::array<double, 3> lower() const { return {p_lo, alpha_lo, t_lo}; }
  std::array<double, 3> upper() const { return {p_hi, alpha_hi, t_hi}; }
};

/// Two-part CCDF curve: exp(-m/T) below the crossover, tail_level (m/m_c)^-alpha
/// from the crossover up. The continuous model has tail_level = exp(-m_c/T);
/// the fixed-proportion baseline generally does not.
struct CcdfCurve {
  double temperature;
  double crossover;
  double tail_level;
  double alpha;

  static CcdfCurve from_params(const TwoClassParams& params);
  double operator()(double m) const;
};

/// Everything the loss needs from one dataset, computed once: the CCDF, the
/// class statistic with its logs, prefix sums for restricted means.
class FitContext {
 public:
  /// k >= 2 (clamped to N). Throws std::invalid_argument for k < 2.
  FitContext(IncomeSample sample, std::size_t k);

  const IncomeSample& sample() const noexcept { return sample_; }
  const EmpiricalCcdf& ccdf() const noexcept { return ccdf_; }
  const ClassStatistic& classes() const noexcept { return classes_; }
  std::size_t k() const noexcept { return classes_.k(); }
  double mean() const noexcept { return mean_; }

  /// Loss points eta_1..eta_{k-1}, ascending, with ln(eta) and ln C(eta).
  std::span<const double> grid_income() const noexcept { return grid_income_; }
  std::span<const double> grid_log_income() const noexcept { return grid_log_income_; }
  std::span<const double> grid_log_ccdf() const noexcept { return grid_log_ccdf_; }

  /// Mean of incomes strictly below the cutoff, empty when there are none.
  std::optional<double> restricted_mean(double cutoff) const;

  /// Cuboid with T in [lo_factor, hi_factor] times the sample mean.
  SearchBounds default_bounds(double p_lo = 1e-4, double p_hi = 0.2, double alpha_lo = 1.0,
                              double alpha_hi = 3.0, double t_lo_factor = 0.5,
                              double t_hi_factor = 2.0) const;

 private:
  IncomeSample sample_;
  EmpiricalCcdf ccdf_;
  ClassStatistic classes_;
  std::vector<double> grid_income_;
  std::vector<double> grid_log_income_;
  std::vector<double> grid_log_ccdf_;
  std::vector<double> ascending_;
  std::vector<double> prefix_sum_;  // prefix_sum_[i] = sum of ascending_[0..i)
  double mean_;
};

struct ResolvedParams {
  TwoClassParams params;
  double crossover;
  bool clamped;  // p was below the smallest attainable CCDF fraction
};

/// m_c = C^-1(p) by interpolation, lambda = exp(-m_c / T). Throws
/// std::domain_error when the interpolated crossover is not positive or
/// lambda underflows.
ResolvedParams resolve_params(const SearchPoint& x, const EmpiricalCcdf& ccdf);

/// sqrt(mean((ln C - ln C_hat)^2)) over equally long positive vectors.
/// Throws std::invalid_argument on non-positive entries or length mismatch.
double rmsle(std::span<const double> empirical, std::span<const double> model);

/// |<m>_exp(T, m_c) / restricted_mean - 1|.
double l1_penalty(double temperature, double crossover, double restricted_mean);
/// Same, restricted mean computed from the sample; throws std::domain_error
/// when no income lies below m_c.
double l1_penalty(double temperature, double crossover, const IncomeSample& sample);

/// |lambda / p - 1|.
double l2_penalty(double lambda, double p);

struct LossBreakdown {
  double rmsle = kSentinelLoss;
  double l1 = 0.0;
  double l2 = 0.0;
  double total = kSentinelLoss;
  TwoClassParams params{};
  double crossover = 0.0;
  bool degenerate = true;
  bool clamped = false;
};

/// RMSLE + l1 + l2 at x. Degenerate evaluations return the sentinel total
/// rather than throwing.
LossBreakdown loss(const SearchPoint& x, const FitContext& context);

/// RMSLE of a curve on the context's loss points.
double curve_rmsle(const FitContext& context, const CcdfCurve& curve);

/// RMSLE split at the crossover; points equal to m_c count to the tail.
/// total^2 = (n_exp exp^2 + n_tail tail^2) / (n_exp + n_tail).
struct RegionRmsle {
  double exponential;
  double pareto;
  double total;
  std::size_t exponential_points;
  std::size_t pareto_points;
};

RegionRmsle region_rmsle(const FitContext& context, const CcdfCurve& curve);

}  // namespace twoclass
