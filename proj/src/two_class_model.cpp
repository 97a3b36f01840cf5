#include "twoclass/two_class_model.hpp"

#include <cmath>
#include <stdexcept>

#include "twoclass/random.hpp"

namespace twoclass {

namespace {

constexpr double kExpOverflowRatio = 700.0;

}  // namespace

void TwoClassParams::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw std::invalid_argument("temperature must be positive");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("Pareto index must be >= 1");
}

double TwoClassParams::crossover() const { return -temperature * std::log(lambda); }

double TwoClassParams::pareto_scale() const {
  const double mc = crossover();
  return lambda * alpha * std::pow(mc, alpha);
}

double crossover_income(const TwoClassParams& params) {
  params.validate();
  return params.crossover();
}

double model_ccdf(const TwoClassParams& params, double m) {
  if (m < 0.0) throw std::invalid_argument("income must be non-negative");
  const double mc = params.crossover();
  if (m < mc) return std::exp(-m / params.temperature);
  return params.lambda * std::pow(m / mc, -params.alpha);
}

double model_pdf(const TwoClassParams& params, double m) {
  if (m < 0.0) throw std::invalid_argument("income must be non-negative");
  const double mc = params.crossover();
  if (m < mc) return std::exp(-m / params.temperature) / params.temperature;
  // b m^(-alpha-1) with b = lambda alpha m_c^alpha, written relative to m_c.
  return params.lambda * params.alpha / mc * std::pow(m / mc, -params.alpha - 1.0);
}

double exponential_regime_mean(double temperature, double crossover) {
  if (!(temperature > 0.0) || !(crossover > 0.0)) {
    throw std::invalid_argument("exponential regime mean needs T > 0 and m_c > 0");
  }
  const double ratio = crossover / temperature;
  if (ratio > kExpOverflowRatio) return temperature;
  return temperature - crossover / std::expm1(ratio);
}

double model_mean(const TwoClassParams& params) {
  if (!(params.alpha > 1.0)) throw std::domain_error("model mean is infinite for alpha <= 1");
  const double l = params.lambda;
  return params.temperature * ((1.0 - l) - l * std::log(l) / (params.alpha - 1.0));
}

double theoretical_gini(double lambda, double alpha) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (!(alpha > 1.0)) throw std::domain_error("Gini needs alpha > 1");
  const double log_l = std::log(lambda);
  const double l2 = lambda * lambda;
  const double squared_area = (1.0 - l2) / 2.0 - l2 * log_l / (2.0 * alpha - 1.0);
  const double mean_over_t = (1.0 - lambda) - lambda * log_l / (alpha - 1.0);
  return 1.0 - squared_area / mean_over_t;
}

double gini_expansion(double lambda, double alpha) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in [0, 1)");
  if (!(alpha > 1.0)) throw std::domain_error("Gini needs alpha > 1");
  if (lambda == 0.0) return 0.5;
  return 0.5 + (-std::log(lambda) / (alpha - 1.0) - 1.0) * lambda / 2.0;
}

double model_income_from_uniform(const TwoClassParams& params, double u) {
  if (u >= params.lambda) return -params.temperature * std::log(u);
  return params.crossover() * std::pow(u / params.lambda, -1.0 / params.alpha);
}

std::vector<double> draw_incomes(const TwoClassParams& params, std::size_t n, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& m : out) {
    m = model_income_from_uniform(params, uniform_open(rng));
  }
  return out;
}

IncomeSample sample_model(const TwoClassParams& params, std::size_t n, std::uint64_t seed) {
  return IncomeSample::from_values(draw_incomes(params, n, seed));
}

}  // namespace twoclass
