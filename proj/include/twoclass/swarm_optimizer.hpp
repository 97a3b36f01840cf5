#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "twoclass/random.hpp"

namespace twoclass {

using Objective = std::function<double(std::span<const double>)>;

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x) const;
  /// Throws std::invalid_argument unless lower < upper in every dimension.
  void validate() const;
};

/// SPSO2007-style swarm with random informant sets, hybridized with bounded
/// quasi-Newton refinement of the global best.
struct SwarmConfig {
  std::size_t n_candidates = 40;
  std::size_t max_iters = 200;
  std::size_t informants = 3;  // K
  double c1 = 1.7;
  double c2 = 1.7;
  double w_start = 0.7;
  double w_end = 0.4;
  Bounds bounds;
  std::uint64_t seed = 1;
  std::size_t refine_every = 10;  // 0 disables periodic refinement
  std::size_t refine_max_steps = 100;
  /// The first `candidate_refine_rounds` refinement events also polish every
  /// candidate's personal best, with at most candidate_refine_steps steps each.
  std::size_t candidate_refine_rounds = 0;
  std::size_t candidate_refine_steps = 10;

  void validate() const;
  /// Inertia for the step that produces iteration t + 1; linear from w_start
  /// at t = 0 to w_end at t = max_iters - 1.
  double inertia(std::size_t t) const;
};

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  double loss;
  std::vector<double> best_position;
  double best_loss;
  std::vector<std::size_t> informants;  // sorted, always contains the particle itself
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> best_position;
  double best_loss;
  std::size_t iteration = 0;
  /// Number of informant redraws so far (the initial draw excluded).
  std::size_t redraws = 0;
  std::size_t evaluations = 0;
  Rng rng;

  /// Position of the best personal best among particle i's informants.
  std::span<const double> neighborhood_best(std::size_t i) const;
};

SwarmState initialize(const SwarmConfig& config, const Objective& objective);

/// One synchronous swarm iteration. Coordinates leaving the box are clamped to
/// the face with that velocity component zeroed. Informant sets are redrawn
/// when the global best did not improve.
void step(SwarmState& state, const SwarmConfig& config, const Objective& objective);

/// Redraws every informant set: each candidate joins K randomly chosen sets.
void draw_informants(SwarmState& state, std::size_t k);

struct RefineResult {
  std::vector<double> position;
  double loss;
  std::size_t steps;
  std::size_t evaluations;
};

/// Bounded quasi-Newton (projected L-BFGS) descent from `start` with central
/// finite-difference gradients, h = 1e-6 max(|x|, 1) per coordinate, one-sided
/// where a central stencil would leave the box. Never returns a point worse
/// than the start; a non-finite start value returns the start unchanged.
RefineResult refine(std::span<const double> start, const Objective& objective, const Bounds& bounds,
                    std::size_t max_steps);

struct TraceEntry {
  std::size_t iteration;
  double best_loss;
  std::vector<double> best_position;
};

struct OptimizeResult {
  std::vector<double> best_position;
  double best_loss;
  std::vector<TraceEntry> trace;  // one entry per iteration, after any refinement
  std::size_t evaluations;
};

/// initialize, max_iters steps, refinement of the global best every
/// refine_every iterations and once at the end.
OptimizeResult optimize(const SwarmConfig& config, const Objective& objective);

/// Trace as comma-delimited text: iteration,best_loss,x0,x1,...
void write_trace(std::ostream& out, std::span<const TraceEntry> trace);

}  // namespace twoclass
