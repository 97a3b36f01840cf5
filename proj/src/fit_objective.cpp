#include "twoclass/fit_objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twoclass {

namespace {

struct SquaredResiduals {
  double exponential = 0.0;
  double pareto = 0.0;
  std::size_t split = 0;  // index of the first point >= m_c
};

SquaredResiduals squared_log_residuals(const FitContext& ctx, const CcdfCurve& curve) {
  auto eta = ctx.grid_income();
  auto log_eta = ctx.grid_log_income();
  auto log_c = ctx.grid_log_ccdf();
  SquaredResiduals out;
  out.split = static_cast<std::size_t>(std::lower_bound(eta.begin(), eta.end(), curve.crossover) - eta.begin());

  const double inv_t = 1.0 / curve.temperature;
  for (std::size_t i = 0; i < out.split; ++i) {
    const double r = log_c[i] + eta[i] * inv_t;
    out.exponential += r * r;
  }
  const double log_level = std::log(curve.tail_level);
  const double log_mc = std::log(curve.crossover);
  for (std::size_t i = out.split; i < eta.size(); ++i) {
    const double r = log_c[i] - (log_level - curve.alpha * (log_eta[i] - log_mc));
    out.pareto += r * r;
  }
  return out;
}

}  // namespace

SearchPoint SearchPoint::from_span(std::span<const double> x) {
  if (x.size() != 3) throw std::invalid_argument("search point has three coordinates");
  return {x[0], x[1], x[2]};
}

bool SearchBounds::contains(const SearchPoint& x) const {
  return x.p >= p_lo && x.p <= p_hi && x.alpha >= alpha_lo && x.alpha <= alpha_hi &&
         x.temperature >= t_lo && x.temperature <= t_hi;
}

CcdfCurve CcdfCurve::from_params(const TwoClassParams& params) {
  return {params.temperature, params.crossover(), params.lambda, params.alpha};
}

double CcdfCurve::operator()(double m) const {
  if (m < crossover) return std::exp(-m / temperature);
  return tail_level * std::pow(m / crossover, -alpha);
}

FitContext::FitContext(IncomeSample sample, std::size_t k)
    : sample_(std::move(sample)), ccdf_(sample_), classes_(class_statistic(sample_, k)) {
  if (k < 2) throw std::invalid_argument("loss needs k >= 2 class points");
  auto points = classes_.loss_points();
  grid_income_.assign(points.begin(), points.end());
  grid_log_income_.reserve(points.size());
  grid_log_ccdf_.reserve(points.size());
  for (double eta : points) {
    grid_log_income_.push_back(std::log(eta));
    grid_log_ccdf_.push_back(std::log(ccdf_(eta)));
  }
  ascending_ = sample_.ascending();
  prefix_sum_.resize(ascending_.size() + 1, 0.0);
  for (std::size_t i = 0; i < ascending_.size(); ++i) prefix_sum_[i + 1] = prefix_sum_[i] + ascending_[i];
  mean_ = prefix_sum_.back() / static_cast<double>(ascending_.size());
}

std::optional<double> FitContext::restricted_mean(double cutoff) const {
  const auto count = static_cast<std::size_t>(
      std::lower_bound(ascending_.begin(), ascending_.end(), cutoff) - ascending_.begin());
  if (count == 0) return std::nullopt;
  return prefix_sum_[count] / static_cast<double>(count);
}

SearchBounds FitContext::default_bounds(double p_lo, double p_hi, double alpha_lo, double alpha_hi,
                                        double t_lo_factor, double t_hi_factor) const {
  return {p_lo, p_hi, alpha_lo, alpha_hi, t_lo_factor * mean_, t_hi_factor * mean_};
}

ResolvedParams resolve_params(const SearchPoint& x, const EmpiricalCcdf& ccdf) {
  const InverseCcdf inv = ccdf.inverse(x.p);
  if (!(inv.income > 0.0)) throw std::domain_error("interpolated crossover income is not positive");
  const double lambda = std::exp(-inv.income / x.temperature);
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::domain_error("crossover ratio m_c/T out of range");
  return {{lambda, x.temperature, x.alpha}, inv.income, inv.clamped};
}

double rmsle(std::span<const double> empirical, std::span<const double> model) {
  if (empirical.size() != model.size() || empirical.empty()) {
    throw std::invalid_argument("rmsle needs two non-empty vectors of equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) {
    if (!(empirical[i] > 0.0) || !(model[i] > 0.0)) throw std::invalid_argument("rmsle needs positive CCDF values");
    const double r = std::log(empirical[i]) - std::log(model[i]);
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(empirical.size()));
}

double l1_penalty(double temperature, double crossover, double restricted_mean) {
  return std::abs(exponential_regime_mean(temperature, crossover) / restricted_mean - 1.0);
}

double l1_penalty(double temperature, double crossover, const IncomeSample& sample) {
  return l1_penalty(temperature, crossover, empirical_mean(sample, crossover));
}

double l2_penalty(double lambda, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("l2 penalty needs p > 0");
  return std::abs(lambda / p - 1.0);
}

LossBreakdown loss(const SearchPoint& x, const FitContext& context) {
  LossBreakdown out;
  ResolvedParams resolved;
  try {
    resolved = resolve_params(x, context.ccdf());
  } catch (const std::exception&) {
    return out;
  }
  out.params = resolved.params;
  out.crossover = resolved.crossover;
  out.clamped = resolved.clamped;

  const auto below = context.restricted_mean(resolved.crossover);
  if (!below) return out;

  const CcdfCurve curve{x.temperature, resolved.crossover, resolved.params.lambda, x.alpha};
  const double fit = curve_rmsle(context, curve);
  const double l1 = l1_penalty(x.temperature, resolved.crossover, *below);
  const double l2 = l2_penalty(resolved.params.lambda, x.p);
  const double total = fit + l1 + l2;
  if (!std::isfinite(total) || total >= kSentinelLoss) return out;

  out.rmsle = fit;
  out.l1 = l1;
  out.l2 = l2;
  out.total = total;
  out.degenerate = false;
  return out;
}

double curve_rmsle(const FitContext& context, const CcdfCurve& curve) {
  if (!(curve.tail_level > 0.0)) return std::numeric_limits<double>::infinity();
  const auto sq = squared_log_residuals(context, curve);
  return std::sqrt((sq.exponential + sq.pareto) / static_cast<double>(context.grid_income().size()));
}

RegionRmsle region_rmsle(const FitContext& context, const CcdfCurve& curve) {
  const auto sq = squared_log_residuals(context, curve);
  const std::size_t n = context.grid_income().size();
  const std::size_t n_tail = n - sq.split;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RegionRmsle out;
  out.exponential_points = sq.split;
  out.pareto_points = n_tail;
  out.exponential = sq.split > 0 ? std::sqrt(sq.exponential / static_cast<double>(sq.split)) : nan;
  out.pareto = n_tail > 0 ? std::sqrt(sq.pareto / static_cast<double>(n_tail)) : nan;
  out.total = std::sqrt((sq.exponential + sq.pareto) / static_cast<double>(n));
  return out;
}

}  // namespace twoclass
