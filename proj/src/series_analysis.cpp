#include "twoclass/series_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "twoclass/parallel.hpp"
#include "twoclass/random.hpp"

namespace twoclass {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("series lengths differ");
  if (xs.size() < 3) throw std::invalid_argument("need at least three paired points");
}

struct Moments {
  double mean_x, mean_y, sxx, syy, sxy;
};

Moments moments(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  Moments m{0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m.mean_x += xs[i];
    m.mean_y += ys[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - m.mean_x;
    const double dy = ys[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

std::string number(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string(); }

}  // namespace

std::vector<double> IndicatorSeries::column(double YearIndicators::*field) const {
  std::vector<double> out;
  out.reserve(years.size());
  for (const auto& y : years) out.push_back(y.*field);
  return out;
}

IndicatorSeries build_series(std::vector<YearSample> datasets, const std::map<int, double>& deflators,
                             int reference_year, const SeriesConfig& config) {
  std::sort(datasets.begin(), datasets.end(), [](const auto& a, const auto& b) { return a.year < b.year; });
  for (std::size_t i = 1; i < datasets.size(); ++i) {
    if (datasets[i].year == datasets[i - 1].year) {
      throw std::invalid_argument(fmt::format("duplicate dataset for year {}", datasets[i].year));
    }
  }
  const auto ref = deflators.find(reference_year);
  if (ref == deflators.end()) {
    throw std::invalid_argument(fmt::format("no deflator for reference year {}", reference_year));
  }
  for (const auto& d : datasets) {
    const auto it = deflators.find(d.year);
    if (it == deflators.end()) throw std::invalid_argument(fmt::format("no deflator for year {}", d.year));
    if (!(it->second > 0.0)) throw std::invalid_argument(fmt::format("deflator for year {} is not positive", d.year));
  }

  IndicatorSeries out{reference_year, std::vector<YearIndicators>(datasets.size())};
  parallel_for(datasets.size(), config.threads, [&](std::size_t i) {
    const auto& d = datasets[i];
    const FitContext ctx(d.sample, config.fit.k);
    const FitResult fit = fit_two_class(ctx, config.fit, derive_seed(config.seed, static_cast<std::uint64_t>(d.year)));
    const double ratio = ref->second / deflators.at(d.year);
    YearIndicators& y = out.years[i];
    y.year = d.year;
    y.deflator_ratio = ratio;
    y.gini_empirical = fit.empirical_gini;
    if (fit.ok()) {
      y.lambda = fit.params.lambda;
      y.temperature = fit.params.temperature;
      y.alpha = fit.params.alpha;
      y.crossover = fit.crossover;
      y.gini_theoretical = fit.theoretical_gini;
      y.rmsle = fit.loss.rmsle;
      y.loss = fit.loss.total;
    } else {
      y.lambda = y.temperature = y.alpha = y.crossover = y.gini_theoretical = y.rmsle = kNaN;
      y.loss = fit.loss.total;
    }
    y.temperature_deflated = y.temperature * ratio;
    y.crossover_deflated = y.crossover * ratio;
  });
  return out;
}

double pearson_rho(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const Moments m = moments(xs, ys);
  if (m.sxx == 0.0 || m.syy == 0.0) throw std::invalid_argument("correlation undefined for a constant series");
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

double two_sided_t_p_value(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  if (std::isnan(t)) return kNaN;
  const boost::math::students_t_distribution<double> dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

Correlation pearson(std::span<const double> xs, std::span<const double> ys, std::uint64_t seed, std::size_t draws) {
  Correlation out{};
  out.n = xs.size();
  out.rho = pearson_rho(xs, ys);
  const double dof = static_cast<double>(out.n) - 2.0;
  const double denom = 1.0 - out.rho * out.rho;
  const double t = denom > 0.0 ? out.rho * std::sqrt(dof / denom) : std::copysign(INFINITY, out.rho);
  out.p_value = two_sided_t_p_value(t, dof);

  // Paired bootstrap over the points; degenerate (constant) resamples are skipped.
  Rng rng(seed);
  std::vector<double> bx(out.n), by(out.n), rhos;
  rhos.reserve(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    for (std::size_t i = 0; i < out.n; ++i) {
      const std::size_t j = uniform_index(rng, out.n);
      bx[i] = xs[j];
      by[i] = ys[j];
    }
    const Moments m = moments(bx, by);
    if (m.sxx == 0.0 || m.syy == 0.0) continue;
    rhos.push_back(std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0));
  }
  if (rhos.size() < 2) {
    out.uncertainty = kNaN;
  } else {
    double mean = 0.0;
    for (double r : rhos) mean += r;
    mean /= static_cast<double>(rhos.size());
    double ss = 0.0;
    for (double r : rhos) ss += (r - mean) * (r - mean);
    out.uncertainty = std::sqrt(ss / static_cast<double>(rhos.size() - 1));
  }
  return out;
}

AffineFit affine_regression(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const Moments m = moments(xs, ys);
  if (m.sxx == 0.0) throw std::invalid_argument("regression undefined for constant x");
  const double n = static_cast<double>(xs.size());

  AffineFit out{};
  out.n = xs.size();
  out.slope = m.sxy / m.sxx;
  out.intercept = m.mean_y - out.slope * m.mean_x;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (out.intercept + out.slope * xs[i]);
    rss += r * r;
  }
  out.residual_se = std::sqrt(rss / (n - 2.0));
  out.slope_se = out.residual_se / std::sqrt(m.sxx);
  out.intercept_se = out.residual_se * std::sqrt(1.0 / n + m.mean_x * m.mean_x / m.sxx);
  out.rho = m.syy > 0.0 ? std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0) : kNaN;
  const double t = out.slope_se > 0.0 ? out.slope / out.slope_se : (out.slope == 0.0 ? kNaN : std::copysign(INFINITY, out.slope));
  out.p_value = two_sided_t_p_value(t, n - 2.0);
  return out;
}

void write_series_table(std::ostream& out, const IndicatorSeries& series) {
  out << "year,top_percentage,temperature,temperature_deflated,pareto_index,crossover_income,"
         "crossover_income_deflated,gini_theoretical,gini_empirical,rmsle,loss,deflator_ratio\n";
  for (const auto& y : series.years) {
    out << y.year << ',' << number(y.lambda) << ',' << number(y.temperature) << ',' << number(y.temperature_deflated)
        << ',' << number(y.alpha) << ',' << number(y.crossover) << ',' << number(y.crossover_deflated) << ','
        << number(y.gini_theoretical) << ',' << number(y.gini_empirical) << ',' << number(y.rmsle) << ','
        << number(y.loss) << ',' << number(y.deflator_ratio) << '\n';
  }
}

}  // namespace twoclass
