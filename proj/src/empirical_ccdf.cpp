#include "twoclass/empirical_ccdf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace twoclass {

IncomeSample IncomeSample::from_values(std::vector<double> values) {
  if (values.size() < 2) throw std::invalid_argument("insufficient data: need at least two incomes");
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("income values must be finite and positive, got " + std::to_string(v));
    }
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return IncomeSample(std::move(values));
}

std::vector<double> IncomeSample::ascending() const { return {desc_.rbegin(), desc_.rend()}; }

double IncomeSample::order_statistic(std::size_t rank) const {
  if (rank == 0 || rank > desc_.size()) throw std::out_of_range("order statistic rank out of range");
  return desc_[rank - 1];
}

EmpiricalCcdf::EmpiricalCcdf(const IncomeSample& sample) : n_(sample.size()) {
  auto desc = sample.descending();
  const double n = static_cast<double>(n_);
  // Walk from the smallest income; the count of values >= u is everything not
  // yet passed.
  std::size_t below = 0;
  for (std::size_t i = desc.size(); i-- > 0;) {
    const double u = desc[i];
    if (incomes_.empty() || u != incomes_.back()) {
      incomes_.push_back(u);
      fractions_.push_back(static_cast<double>(n_ - below) / n);
    }
    ++below;
  }
}

double EmpiricalCcdf::operator()(double m) const {
  auto it = std::lower_bound(incomes_.begin(), incomes_.end(), m);
  if (it == incomes_.end()) return 0.0;
  return fractions_[static_cast<std::size_t>(it - incomes_.begin())];
}

InverseCcdf EmpiricalCcdf::inverse(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("inverse CCDF requires 0 < p <= 1");
  if (p < fractions_.back()) return {incomes_.back(), true};
  // First knot whose fraction is below p; the one before it brackets p from above.
  auto it = std::partition_point(fractions_.begin(), fractions_.end(), [p](double f) { return f >= p; });
  const auto j = static_cast<std::size_t>(it - fractions_.begin()) - 1;
  if (fractions_[j] == p || j + 1 == fractions_.size()) return {incomes_[j], false};
  const double t = (fractions_[j] - p) / (fractions_[j] - fractions_[j + 1]);
  return {incomes_[j] + t * (incomes_[j + 1] - incomes_[j]), false};
}

EmpiricalCcdf build_ccdf(const IncomeSample& sample) { return EmpiricalCcdf(sample); }

InverseCcdf inverse_ccdf(const EmpiricalCcdf& ccdf, double p) { return ccdf.inverse(p); }

ClassStatistic class_statistic(const IncomeSample& sample, std::size_t k) {
  if (k == 0) throw std::invalid_argument("class statistic needs k >= 1");
  const std::size_t n = sample.size();
  k = std::min(k, n);
  ClassStatistic out;
  out.points.resize(k);
  auto desc = sample.descending();
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t rank = i * n / k;  // floor(i N / k), >= 1 since k <= N
    // rank grows with i and picks ever smaller incomes; fill from the back.
    out.points[k - i] = desc[rank - 1];
  }
  return out;
}

double empirical_mean(const IncomeSample& sample, std::optional<double> upper_cutoff) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : sample.descending()) {
    if (upper_cutoff && !(v < *upper_cutoff)) continue;
    sum += v;
    ++count;
  }
  if (count == 0) throw std::domain_error("no incomes below the cutoff (degenerate crossover)");
  return sum / static_cast<double>(count);
}

double empirical_gini(const IncomeSample& sample) {
  if (sample.min() == sample.max()) return 0.0;
  auto desc = sample.descending();
  const std::size_t n = desc.size();
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    // Ascending rank of desc[r] is n - r.
    const double i = static_cast<double>(n - r);
    weighted += (2.0 * i - static_cast<double>(n) - 1.0) * desc[r];
    total += desc[r];
  }
  return weighted / (static_cast<double>(n) * total);
}

}  // namespace twoclass
