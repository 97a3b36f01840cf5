#include "twoclass/swarm_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace twoclass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double evaluate(const Objective& objective, std::span<const double> x) {
  const double v = objective(x);
  return std::isnan(v) ? kInf : v;
}

std::size_t best_index(const SwarmState& state) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.particles.size(); ++i) {
    if (state.particles[i].best_loss < state.particles[best].best_loss) best = i;
  }
  return best;
}

// Quasi-Newton memory pair in normalized coordinates.
struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

class BoxMap {
 public:
  explicit BoxMap(const Bounds& b) : lo_(b.lower), hi_(b.upper), width_(b.lower.size()) {
    for (std::size_t i = 0; i < width_.size(); ++i) width_[i] = hi_[i] - lo_[i];
  }

  std::vector<double> to_box(std::span<const double> z) const {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = std::clamp(lo_[i] + z[i] * width_[i], lo_[i], hi_[i]);
    return x;
  }

  std::vector<double> to_unit(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::clamp((x[i] - lo_[i]) / width_[i], 0.0, 1.0);
    return z;
  }

  // Finite-difference gradient at x, expressed in unit-box coordinates.
  std::vector<double> gradient(const Objective& f, std::span<const double> x, double fx,
                               std::size_t& evaluations) const {
    std::vector<double> g(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = 1e-6 * std::max(std::abs(x[i]), 1.0);
      const bool room_up = x[i] + h <= hi_[i];
      const bool room_down = x[i] - h >= lo_[i];
      double d;
      if (room_up && room_down) {
        probe[i] = x[i] + h;
        const double up = evaluate(f, probe);
        probe[i] = x[i] - h;
        const double down = evaluate(f, probe);
        evaluations += 2;
        d = (up - down) / (2.0 * h);
      } else if (room_up) {
        probe[i] = x[i] + h;
        d = (evaluate(f, probe) - fx) / h;
        ++evaluations;
      } else if (room_down) {
        probe[i] = x[i] - h;
        d = (fx - evaluate(f, probe)) / h;
        ++evaluations;
      } else {
        d = 0.0;
      }
      probe[i] = x[i];
      g[i] = std::isfinite(d) ? d * width_[i] : 0.0;
    }
    return g;
  }

 private:
  std::vector<double> lo_, hi_, width_;
};

}  // namespace

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

void Bounds::validate() const {
  if (lower.empty() || lower.size() != upper.size()) throw std::invalid_argument("bounds need matching non-empty lower/upper");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw std::invalid_argument(fmt::format("bounds dimension {} is empty", i));
  }
}

void SwarmConfig::validate() const {
  if (n_candidates < 2) throw std::invalid_argument("swarm needs at least two candidates");
  if (max_iters < 1) throw std::invalid_argument("swarm needs at least one iteration");
  if (informants < 1) throw std::invalid_argument("informant count K must be >= 1");
  if (!(w_end > 0.0 && w_end <= w_start && w_start < 1.0)) throw std::invalid_argument("inertia schedule needs 0 < w_end <= w_start < 1");
  bounds.validate();
}

double SwarmConfig::inertia(std::size_t t) const {
  if (max_iters <= 1) return w_start;
  const double frac = std::min(1.0, static_cast<double>(t) / static_cast<double>(max_iters - 1));
  return w_start + (w_end - w_start) * frac;
}

std::span<const double> SwarmState::neighborhood_best(std::size_t i) const {
  const auto& informants = particles[i].informants;
  std::size_t best = informants.front();
  for (std::size_t j : informants) {
    if (particles[j].best_loss < particles[best].best_loss) best = j;
  }
  return particles[best].best_position;
}

void draw_informants(SwarmState& state, std::size_t k) {
  const std::size_t n = state.particles.size();
  for (std::size_t i = 0; i < n; ++i) state.particles[i].informants.assign(1, i);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t draw = 0; draw < k; ++draw) {
      state.particles[uniform_index(state.rng, n)].informants.push_back(j);
    }
  }
  for (auto& p : state.particles) {
    std::sort(p.informants.begin(), p.informants.end());
    p.informants.erase(std::unique(p.informants.begin(), p.informants.end()), p.informants.end());
  }
}

SwarmState initialize(const SwarmConfig& config, const Objective& objective) {
  config.validate();
  const auto& lo = config.bounds.lower;
  const auto& hi = config.bounds.upper;
  const std::size_t dim = config.bounds.dimension();

  SwarmState state{.particles = {}, .best_position = {}, .best_loss = kInf, .rng = Rng(config.seed)};
  state.particles.resize(config.n_candidates);
  for (auto& p : state.particles) {
    p.position.resize(dim);
    p.velocity.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) p.position[d] = uniform_in(state.rng, lo[d], hi[d]);
    for (std::size_t d = 0; d < dim; ++d) {
      p.velocity[d] = (uniform_in(state.rng, lo[d], hi[d]) - p.position[d]) / 2.0;
    }
  }
  draw_informants(state, config.informants);
  for (auto& p : state.particles) {
    p.loss = evaluate(objective, p.position);
    p.best_position = p.position;
    p.best_loss = p.loss;
  }
  state.evaluations = config.n_candidates;
  const std::size_t best = best_index(state);
  state.best_position = state.particles[best].best_position;
  state.best_loss = state.particles[best].best_loss;
  return state;
}

void step(SwarmState& state, const SwarmConfig& config, const Objective& objective) {
  const auto& lo = config.bounds.lower;
  const auto& hi = config.bounds.upper;
  const std::size_t dim = config.bounds.dimension();
  const double w = config.inertia(state.iteration);

  // Neighborhood bests come from the previous iteration's personal bests.
  std::vector<std::vector<double>> guides;
  guides.reserve(state.particles.size());
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    auto g = state.neighborhood_best(i);
    guides.emplace_back(g.begin(), g.end());
  }

  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    Particle& p = state.particles[i];
    for (std::size_t d = 0; d < dim; ++d) {
      const double r1 = uniform01(state.rng);
      const double r2 = uniform01(state.rng);
      double v = w * p.velocity[d] + config.c1 * r1 * (p.best_position[d] - p.position[d]) +
                 config.c2 * r2 * (guides[i][d] - p.position[d]);
      double x = p.position[d] + v;
      if (x < lo[d]) {
        x = lo[d];
        v = 0.0;
      } else if (x > hi[d]) {
        x = hi[d];
        v = 0.0;
      }
      p.position[d] = x;
      p.velocity[d] = v;
    }
  }

  // Objective calls happen after all random draws, in candidate order.
  for (auto& p : state.particles) p.loss = evaluate(objective, p.position);
  state.evaluations += state.particles.size();

  bool improved = false;
  for (auto& p : state.particles) {
    if (p.loss < p.best_loss) {
      p.best_loss = p.loss;
      p.best_position = p.position;
    }
    if (p.best_loss < state.best_loss) {
      state.best_loss = p.best_loss;
      state.best_position = p.best_position;
      improved = true;
    }
  }
  if (!improved) {
    draw_informants(state, config.informants);
    ++state.redraws;
  }
  ++state.iteration;
}

RefineResult refine(std::span<const double> start, const Objective& objective, const Bounds& bounds,
                    std::size_t max_steps) {
  constexpr std::size_t kMemory = 5;
  constexpr double kArmijo = 1e-4;
  constexpr double kGradientTolerance = 1e-12;

  RefineResult result{{start.begin(), start.end()}, 0.0, 0, 1};
  result.loss = evaluate(objective, start);
  if (!std::isfinite(result.loss) || !bounds.contains(start)) return result;

  const BoxMap box(bounds);
  const std::size_t dim = start.size();
  std::vector<double> z = box.to_unit(start);
  std::vector<double> x(start.begin(), start.end());
  double fx = result.loss;
  std::vector<double> g = box.gradient(objective, x, fx, result.evaluations);
  std::deque<CurvaturePair> memory;

  while (result.steps < max_steps) {
    ++result.steps;
    // Projected gradient: components pushing out of the box are inactive.
    std::vector<double> pg(g);
    double pg_norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      if ((z[i] <= 0.0 && g[i] > 0.0) || (z[i] >= 1.0 && g[i] < 0.0)) pg[i] = 0.0;
      pg_norm = std::max(pg_norm, std::abs(pg[i]));
    }
    if (pg_norm < kGradientTolerance) break;

    // Two-loop recursion on the free subspace.
    const double first_step_scale = std::min(1.0, 0.1 / pg_norm);
    std::vector<double> q(pg);
    std::vector<double> a(memory.size());
    for (std::size_t m = memory.size(); m-- > 0;) {
      a[m] = memory[m].rho * dot(memory[m].s, q);
      for (std::size_t i = 0; i < dim; ++i) q[i] -= a[m] * memory[m].y[i];
    }
    const double gamma = memory.empty() ? first_step_scale
                                        : dot(memory.back().s, memory.back().y) / dot(memory.back().y, memory.back().y);
    for (double& v : q) v *= gamma;
    for (std::size_t m = 0; m < memory.size(); ++m) {
      const double b = memory[m].rho * dot(memory[m].y, q);
      for (std::size_t i = 0; i < dim; ++i) q[i] += memory[m].s[i] * (a[m] - b);
    }
    std::vector<double> direction(dim);
    for (std::size_t i = 0; i < dim; ++i) direction[i] = pg[i] == 0.0 ? 0.0 : -q[i];
    if (dot(direction, pg) >= 0.0) {
      memory.clear();
      for (std::size_t i = 0; i < dim; ++i) direction[i] = -pg[i] * first_step_scale;
    }

    // Backtracking along the projected path.
    bool accepted = false;
    std::vector<double> z_next(dim), x_next;
    double f_next = fx;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      bool moved = false;
      for (std::size_t i = 0; i < dim; ++i) {
        z_next[i] = std::clamp(z[i] + t * direction[i], 0.0, 1.0);
        moved = moved || z_next[i] != z[i];
      }
      if (!moved) break;
      x_next = box.to_box(z_next);
      f_next = evaluate(objective, x_next);
      ++result.evaluations;
      double decrease = 0.0;
      for (std::size_t i = 0; i < dim; ++i) decrease += g[i] * (z_next[i] - z[i]);
      if (f_next < fx && f_next <= fx + kArmijo * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (memory.empty()) break;
      memory.clear();
      continue;
    }

    std::vector<double> g_next = box.gradient(objective, x_next, f_next, result.evaluations);
    CurvaturePair pair{std::vector<double>(dim), std::vector<double>(dim), 0.0};
    for (std::size_t i = 0; i < dim; ++i) {
      pair.s[i] = z_next[i] - z[i];
      pair.y[i] = g_next[i] - g[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-12 * std::sqrt(dot(pair.s, pair.s) * dot(pair.y, pair.y)) && sy > 0.0) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > kMemory) memory.pop_front();
    }
    z = std::move(z_next);
    x = std::move(x_next);
    fx = f_next;
    g = std::move(g_next);
  }

  if (fx < result.loss) {
    result.position = x;
    result.loss = fx;
  }
  return result;
}

OptimizeResult optimize(const SwarmConfig& config, const Objective& objective) {
  SwarmState state = initialize(config, objective);
  std::size_t refine_evaluations = 0;

  std::size_t rounds = 0;
  auto refine_global = [&] {
    if (rounds++ < config.candidate_refine_rounds) {
      for (auto& p : state.particles) {
        RefineResult r = refine(p.best_position, objective, config.bounds, config.candidate_refine_steps);
        refine_evaluations += r.evaluations;
        if (r.loss < p.best_loss) {
          p.best_loss = r.loss;
          p.best_position = r.position;
          if (r.loss < state.best_loss) {
            state.best_loss = r.loss;
            state.best_position = r.position;
          }
        }
      }
    }
    const std::size_t owner = best_index(state);
    RefineResult r = refine(state.best_position, objective, config.bounds, config.refine_max_steps);
    refine_evaluations += r.evaluations;
    if (r.loss < state.best_loss) {
      state.best_loss = r.loss;
      state.best_position = r.position;
      state.particles[owner].best_position = r.position;
      state.particles[owner].best_loss = r.loss;
    }
  };

  OptimizeResult out;
  out.trace.reserve(config.max_iters);
  for (std::size_t t = 0; t < config.max_iters; ++t) {
    step(state, config, objective);
    const bool last = t + 1 == config.max_iters;
    if (last || (config.refine_every > 0 && (t + 1) % config.refine_every == 0)) refine_global();
    out.trace.push_back({t + 1, state.best_loss, state.best_position});
  }
  out.best_position = state.best_position;
  out.best_loss = state.best_loss;
  out.evaluations = state.evaluations + refine_evaluations;
  return out;
}

void write_trace(std::ostream& out, std::span<const TraceEntry> trace) {
  out << "iteration,best_loss";
  if (!trace.empty()) {
    for (std::size_t d = 0; d < trace.front().best_position.size(); ++d) out << ",x" << d;
  }
  out << '\n';
  for (const auto& e : trace) {
    out << e.iteration << ',' << fmt::format("{}", e.best_loss);
    for (double v : e.best_position) out << ',' << fmt::format("{}", v);
    out << '\n';
  }
}

}  // namespace twoclass
