#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "twoclass/empirical_ccdf.hpp"

namespace twoclass {

/// Continuous two-class income model: exponential body with temperature T
/// below the crossover m_c = T ln(1/lambda), Pareto tail with index alpha
/// above it. The exponential amplitude is fixed to one, so the CCDF is
///
///   C(m) = exp(-m / T)                 m <  m_c
///   C(m) = lambda (m / m_c)^(-alpha)   m >= m_c
///
/// and continuity at m_c holds by construction.
struct TwoClassParams {
  double lambda = 0.1;        // fraction of the population in the tail
  double temperature = 1.0;   // currency units
  double alpha = 2.0;         // Pareto index

  /// Throws std::invalid_argument unless 0 < lambda < 1, T > 0 and alpha >= 1.
  /// (alpha == 1 is a valid CCDF; the mean and Gini need alpha > 1.)
  void validate() const;

  double crossover() const;
  /// b in the tail density b m^(-alpha-1).
  double pareto_scale() const;
};

double crossover_income(const TwoClassParams& params);

/// Throws std::invalid_argument for m < 0.
double model_ccdf(const TwoClassParams& params, double m);
double model_pdf(const TwoClassParams& params, double m);

/// Mean income of the exponential law truncated to [0, m_c):
/// T - m_c / (exp(m_c / T) - 1). Returns T once m_c / T exceeds 700.
double exponential_regime_mean(double temperature, double crossover);

/// mu = T [(1 - lambda) - lambda ln(lambda) / (alpha - 1)].
/// Throws std::domain_error for alpha <= 1.
double model_mean(const TwoClassParams& params);

/// Closed-form Gini of the model; independent of T. Needs alpha > 1.
double theoretical_gini(double lambda, double alpha);

/// First-order expansion of the Gini around lambda = 0; lambda = 0 gives 0.5.
double gini_expansion(double lambda, double alpha);

/// Inverse-CDF transform of a uniform u in (0, 1].
double model_income_from_uniform(const TwoClassParams& params, double u);

/// n incomes drawn by inverse transform, in draw order. Deterministic in seed.
std::vector<double> draw_incomes(const TwoClassParams& params, std::size_t n, std::uint64_t seed);

/// Same draws wrapped as a sample (n >= 2).
IncomeSample sample_model(const TwoClassParams& params, std::size_t n, std::uint64_t seed);

}  // namespace twoclass
