#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "twoclass/fit_objective.hpp"
#include "twoclass/swarm_optimizer.hpp"

namespace twoclass {

/// Everything that determines a single-dataset fit besides the data and seed.
struct FitConfig {
  std::size_t k = 10000;

  // Search cuboid; temperature bounds are factors of the sample mean.
  double p_lo = 1e-4;
  double p_hi = 0.2;
  double alpha_lo = 1.0;
  double alpha_hi = 3.0;
  double t_lo_factor = 0.5;
  double t_hi_factor = 2.0;

  std::size_t n_candidates = 40;
  std::size_t max_iters = 200;
  std::size_t informants = 3;
  double c1 = 1.7;
  double c2 = 1.7;
  double w_start = 0.7;
  double w_end = 0.4;
  std::size_t refine_every = 10;
  std::size_t refine_max_steps = 100;
  std::size_t candidate_refine_rounds = 5;
  std::size_t candidate_refine_steps = 30;

  SearchBounds bounds_for(const FitContext& context) const;
  SwarmConfig swarm_for(const FitContext& context, std::uint64_t seed) const;
};

struct FitResult {
  SearchPoint point;
  LossBreakdown loss;
  TwoClassParams params;
  double crossover;
  double theoretical_gini;  // NaN when alpha == 1
  double empirical_gini;
  RegionRmsle regions;
  std::vector<TraceEntry> trace;
  std::size_t evaluations;

  /// The optimizer found at least one non-degenerate point.
  bool ok() const noexcept { return !loss.degenerate; }
};

/// Hybrid swarm minimization of the regularized loss on one dataset.
FitResult fit_two_class(const FitContext& context, const FitConfig& config, std::uint64_t seed);

}  // namespace twoclass
