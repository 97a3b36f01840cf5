#include "twoclass/fit.hpp"

#include <limits>

namespace twoclass {

SearchBounds FitConfig::bounds_for(const FitContext& context) const {
  return context.default_bounds(p_lo, p_hi, alpha_lo, alpha_hi, t_lo_factor, t_hi_factor);
}

SwarmConfig FitConfig::swarm_for(const FitContext& context, std::uint64_t seed) const {
  const SearchBounds b = bounds_for(context);
  const auto lo = b.lower();
  const auto hi = b.upper();
  SwarmConfig s;
  s.n_candidates = n_candidates;
  s.max_iters = max_iters;
  s.informants = informants;
  s.c1 = c1;
  s.c2 = c2;
  s.w_start = w_start;
  s.w_end = w_end;
  s.bounds = Bounds{{lo.begin(), lo.end()}, {hi.begin(), hi.end()}};
  s.seed = seed;
  s.refine_every = refine_every;
  s.refine_max_steps = refine_max_steps;
  s.candidate_refine_rounds = candidate_refine_rounds;
  s.candidate_refine_steps = candidate_refine_steps;
  return s;
}

FitResult fit_two_class(const FitContext& context, const FitConfig& config, std::uint64_t seed) {
  const Objective objective = [&context](std::span<const double> x) {
    return loss(SearchPoint::from_span(x), context).total;
  };
  OptimizeResult opt = optimize(config.swarm_for(context, seed), objective);

  FitResult out;
  out.point = SearchPoint::from_span(opt.best_position);
  out.loss = loss(out.point, context);
  out.params = out.loss.params;
  out.crossover = out.loss.crossover;
  out.empirical_gini = empirical_gini(context.sample());
  out.theoretical_gini = std::numeric_limits<double>::quiet_NaN();
  if (out.ok()) {
    if (out.params.alpha > 1.0) out.theoretical_gini = theoretical_gini(out.params.lambda, out.params.alpha);
    out.regions = region_rmsle(context, CcdfCurve{out.params.temperature, out.crossover, out.params.lambda,
                                                  out.params.alpha});
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.regions = {nan, nan, nan, 0, 0};
  }
  out.trace = std::move(opt.trace);
  out.evaluations = opt.evaluations;
  return out;
}

}  // namespace twoclass
