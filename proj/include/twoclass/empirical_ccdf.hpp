#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace twoclass {

/// Positive incomes held as the descending order statistic
/// m_(1) >= m_(2) >= ... >= m_(N), N >= 2.
class IncomeSample {
 public:
  /// Sorts `values` descending. Throws std::invalid_argument ("insufficient
  /// data") when fewer than two values are given, or when any value is not a
  /// finite positive number.
  static IncomeSample from_values(std::vector<double> values);

  std::size_t size() const noexcept { return desc_.size(); }
  std::span<const double> descending() const noexcept { return desc_; }
  std::vector<double> ascending() const;

  /// m_(rank) with 1-based rank; rank 1 is the largest income.
  double order_statistic(std::size_t rank) const;

  double max() const noexcept { return desc_.front(); }
  double min() const noexcept { return desc_.back(); }

 private:
  explicit IncomeSample(std::vector<double> desc) : desc_(std::move(desc)) {}

  std::vector<double> desc_;
};

struct InverseCcdf {
  double income;
  /// p fell below the smallest attainable fraction; income is the largest knot.
  bool clamped;
};

/// Step-function CCDF, C(m) = #{i : m_(i) >= m} / N. Ties are collapsed so
/// each distinct income is one knot.
class EmpiricalCcdf {
 public:
  explicit EmpiricalCcdf(const IncomeSample& sample);

  double operator()(double m) const;

  std::span<const double> knot_incomes() const noexcept { return incomes_; }
  std::span<const double> knot_fractions() const noexcept { return fractions_; }
  std::size_t sample_size() const noexcept { return n_; }

  /// Piecewise-linear inverse through the knots; non-increasing in p.
  /// Throws std::invalid_argument unless 0 < p <= 1.
  InverseCcdf inverse(double p) const;

 private:
  std::vector<double> incomes_;    // ascending, distinct
  std::vector<double> fractions_;  // strictly decreasing, fractions_[0] == 1
  std::size_t n_;
};

EmpiricalCcdf build_ccdf(const IncomeSample& sample);
InverseCcdf inverse_ccdf(const EmpiricalCcdf& ccdf, double p);

/// Class statistic eta_n = m_(floor(n N / k)), n = 1..k, stored ascending.
/// The largest point is not used in loss sums.
struct ClassStatistic {
  std::vector<double> points;

  std::size_t k() const noexcept { return points.size(); }
  /// The k - 1 points entering loss sums.
  std::span<const double> loss_points() const noexcept {
    return std::span<const double>(points).first(points.size() - 1);
  }
};

/// k larger than N is clamped to N; k == 0 throws std::invalid_argument.
ClassStatistic class_statistic(const IncomeSample& sample, std::size_t k);

/// Mean of incomes strictly below `upper_cutoff` (whole sample when absent).
/// Throws std::domain_error when nothing lies below the cutoff.
double empirical_mean(const IncomeSample& sample,
                      std::optional<double> upper_cutoff = std::nullopt);

/// Ascending-rank Gini estimator, sum (2i - N - 1) m_i / (N^2 mean).
double empirical_gini(const IncomeSample& sample);

}  // namespace twoclass
