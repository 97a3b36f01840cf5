#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "twoclass/fit.hpp"

namespace twoclass {

struct YearSample {
  int year;
  IncomeSample sample;
};

struct YearIndicators {
  int year;
  double lambda;
  double temperature;
  double temperature_deflated;
  double alpha;
  double crossover;
  double crossover_deflated;
  double gini_theoretical;
  double gini_empirical;
  double rmsle;
  double loss;
  double deflator_ratio;  // reference index / year index
};

struct IndicatorSeries {
  int reference_year;
  std::vector<YearIndicators> years;  // strictly increasing year

  std::vector<double> column(double YearIndicators::*field) const;
};

struct SeriesConfig {
  FitConfig fit;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

/// Fits every year independently (seed derived from the master seed and the
/// year) and deflates T and m_c to reference-year currency. Output is sorted
/// by year. Throws std::invalid_argument naming the year when a deflator is
/// missing, or on duplicate years.
IndicatorSeries build_series(std::vector<YearSample> datasets, const std::map<int, double>& deflators,
                             int reference_year, const SeriesConfig& config);

struct Correlation {
  double rho;
  double p_value;      // two-sided, t = rho sqrt((n-2)/(1-rho^2)) on n-2 dof
  double uncertainty;  // sd of rho over paired bootstrap resamples
  std::size_t n;
};

/// Throws std::invalid_argument for unequal lengths, n < 3 or a constant series.
Correlation pearson(std::span<const double> xs, std::span<const double> ys, std::uint64_t seed = 1,
                    std::size_t draws = 1000);

/// Pearson coefficient alone.
double pearson_rho(std::span<const double> xs, std::span<const double> ys);

/// Ordinary least squares y = intercept + slope x.
struct AffineFit {
  double slope;
  double intercept;
  double slope_se;
  double intercept_se;
  double residual_se;  // sqrt(RSS / (n - 2))
  double rho;
  double p_value;  // slope t-test, two-sided
  std::size_t n;
};

/// Throws std::invalid_argument for unequal lengths, n < 3 or constant xs.
AffineFit affine_regression(std::span<const double> xs, std::span<const double> ys);

/// Two-sided p-value of Student's t with `dof` degrees of freedom.
double two_sided_t_p_value(double t, double dof);

void write_series_table(std::ostream& out, const IndicatorSeries& series);

}  // namespace twoclass
