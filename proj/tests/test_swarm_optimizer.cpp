#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "twoclass/fit.hpp"
#include "twoclass/random.hpp"
#include "twoclass/swarm_optimizer.hpp"

using namespace twoclass;

namespace {

Objective shifted_sphere(std::vector<double> center) {
  return [center = std::move(center)](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return s;
  };
}

SwarmConfig cube_config(std::size_t dim, double lo, double hi, std::uint64_t seed) {
  SwarmConfig c;
  c.bounds = Bounds{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
  c.seed = seed;
  return c;
}

bool inside(const SwarmState& s, const Bounds& b) {
  for (const auto& p : s.particles) {
    if (!b.contains(p.position)) return false;
  }
  return true;
}

}  // namespace

TEST(SwarmConfig, Validation) {
  SwarmConfig c = cube_config(2, 0.0, 1.0, 1);
  EXPECT_NO_THROW(c.validate());
  c.n_candidates = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = cube_config(2, 0.0, 1.0, 1);
  c.w_end = 0.8;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = cube_config(2, 1.0, 1.0, 1);
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(SwarmConfig, InertiaFallsLinearly) {
  SwarmConfig c = cube_config(1, 0.0, 1.0, 1);
  c.max_iters = 11;
  EXPECT_DOUBLE_EQ(c.inertia(0), 0.7);
  EXPECT_DOUBLE_EQ(c.inertia(5), 0.55);
  EXPECT_DOUBLE_EQ(c.inertia(10), 0.4);
}

TEST(Initialize, InsideBoundsAndDeterministic) {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + uniform_index(rng, 4);
    SwarmConfig c;
    c.n_candidates = 2 + uniform_index(rng, 20);
    c.seed = rng();
    for (std::size_t d = 0; d < dim; ++d) {
      const double lo = uniform_in(rng, -100.0, 100.0);
      c.bounds.lower.push_back(lo);
      c.bounds.upper.push_back(lo + uniform_in(rng, 1e-3, 50.0));
    }
    const auto f = shifted_sphere(std::vector<double>(dim, 0.0));
    const SwarmState s = initialize(c, f);
    ASSERT_TRUE(inside(s, c.bounds));
    for (const auto& p : s.particles) {
      EXPECT_EQ(p.best_position, p.position);
      EXPECT_EQ(p.best_loss, p.loss);
      EXPECT_TRUE(std::binary_search(p.informants.begin(), p.informants.end(),
                                     static_cast<std::size_t>(&p - s.particles.data())));
    }
    if (trial < 20) {
      const SwarmState again = initialize(c, f);
      for (std::size_t i = 0; i < s.particles.size(); ++i) {
        EXPECT_EQ(s.particles[i].position, again.particles[i].position);
        EXPECT_EQ(s.particles[i].velocity, again.particles[i].velocity);
        EXPECT_EQ(s.particles[i].informants, again.particles[i].informants);
      }
    }
  }
}

TEST(Informants, MeanSetSizeMatchesMembershipProcess) {
  // Each of N candidates joins K uniformly drawn sets (with replacement); set i
  // always holds i. Expected size 1 + (N - 1)(1 - (1 - 1/N)^K).
  SwarmConfig c = cube_config(1, 0.0, 1.0, 5);
  SwarmState s = initialize(c, shifted_sphere({0.5}));
  const double n = 40.0;
  const double expected = 1.0 + (n - 1.0) * (1.0 - std::pow(1.0 - 1.0 / n, 3.0));
  double total = 0.0;
  std::size_t sets = 0;
  for (int r = 0; r < 2000; ++r) {
    draw_informants(s, 3);
    for (const auto& p : s.particles) {
      total += static_cast<double>(p.informants.size());
      ++sets;
    }
  }
  EXPECT_NEAR(total / static_cast<double>(sets), expected, 0.02);
}

TEST(Step, ParticleAtBestWithZeroVelocityStays) {
  SwarmConfig c = cube_config(2, -1.0, 1.0, 3);
  c.n_candidates = 2;
  const auto f = shifted_sphere({0.25, -0.5});
  SwarmState s = initialize(c, f);
  for (auto& p : s.particles) {
    p.position = {0.25, -0.5};
    p.best_position = p.position;
    p.velocity = {0.0, 0.0};
    p.loss = p.best_loss = 0.0;
  }
  s.best_position = {0.25, -0.5};
  s.best_loss = 0.0;
  step(s, c, f);
  for (const auto& p : s.particles) EXPECT_EQ(p.position, (std::vector<double>{0.25, -0.5}));
}

TEST(Step, SwarmInvariantsHoldEveryIteration) {
  SwarmConfig c = cube_config(3, -5.0, 5.0, 8);
  // Optimum outside the box in the first coordinate.
  const auto f = shifted_sphere({7.0, 1.0, -2.0});
  SwarmState s = initialize(c, f);
  std::vector<double> history_min(s.particles.size());
  for (std::size_t i = 0; i < s.particles.size(); ++i) history_min[i] = s.particles[i].loss;
  double prev_best = s.best_loss;
  bool saw_face = false;
  for (std::size_t t = 0; t < c.max_iters; ++t) {
    const std::size_t redraws = s.redraws;
    step(s, c, f);
    ASSERT_TRUE(inside(s, c.bounds));
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
      const Particle& p = s.particles[i];
      history_min[i] = std::min(history_min[i], p.loss);
      EXPECT_EQ(p.best_loss, history_min[i]);
      for (std::size_t d = 0; d < 3; ++d) {
        if (p.position[d] == c.bounds.lower[d] || p.position[d] == c.bounds.upper[d]) {
          EXPECT_EQ(p.velocity[d], 0.0);
          saw_face = true;
        }
      }
    }
    EXPECT_LE(s.best_loss, prev_best);
    EXPECT_EQ(s.redraws - redraws, s.best_loss < prev_best ? 0u : 1u);
    prev_best = s.best_loss;
  }
  EXPECT_TRUE(saw_face);
  EXPECT_EQ(s.best_position[0], 5.0);
  EXPECT_NEAR(s.best_position[1], 1.0, 1e-4);
  EXPECT_NEAR(s.best_position[2], -2.0, 1e-4);
}

TEST(Step, PureSwarmFindsInteriorSphereOptimum) {
  SwarmConfig c = cube_config(3, -10.0, 10.0, 21);
  const std::vector<double> center{1.5, -3.0, 4.25};
  const auto f = shifted_sphere(center);
  SwarmState s = initialize(c, f);
  for (std::size_t t = 0; t < c.max_iters; ++t) step(s, c, f);
  for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(s.best_position[d], center[d], 1e-4);
}

TEST(Refine, ConvergesOnQuadraticBowl) {
  const std::vector<double> center{0.3, -1.2, 2.0};
  const auto bowl = [&](std::span<const double> x) {
    const double a = x[0] - center[0], b = x[1] - center[1], c = x[2] - center[2];
    return 3.0 * a * a + b * b + 0.5 * c * c + 0.4 * a * b;
  };
  const Bounds b{{-5.0, -5.0, -5.0}, {5.0, 5.0, 5.0}};
  const std::vector<double> start{4.0, 3.0, -4.0};
  const RefineResult r = refine(start, bowl, b, 50);
  EXPECT_LE(r.steps, 50u);
  for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(r.position[d], center[d], 1e-8);
}

TEST(Refine, RespectsActiveBound) {
  const Bounds b{{0.0, 0.0}, {1.0, 1.0}};
  const RefineResult r = refine(std::vector<double>{0.5, 0.5}, shifted_sphere({2.0, 0.25}), b, 100);
  EXPECT_EQ(r.position[0], 1.0);
  EXPECT_NEAR(r.position[1], 0.25, 1e-8);
}

TEST(Refine, LeavesMinimizerAndNonFiniteStartsUnchanged) {
  const Bounds b{{-1.0, -1.0}, {1.0, 1.0}};
  const std::vector<double> center{0.1, 0.2};
  const RefineResult at_min = refine(center, shifted_sphere(center), b, 100);
  EXPECT_EQ(at_min.position, center);
  EXPECT_EQ(at_min.loss, 0.0);

  const Objective nan_objective = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
  const RefineResult r = refine(std::vector<double>{0.5, 0.5}, nan_objective, b, 100);
  EXPECT_EQ(r.position, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(r.steps, 0u);
}

TEST(Refine, MonotoneOnTwoClassLoss) {
  const FitContext ctx(sample_model({0.1, 1800.0, 1.8}, 20000, 12), 2000);
  const FitConfig fc;
  const SwarmConfig sc = fc.swarm_for(ctx, 1);
  const Objective f = [&](std::span<const double> x) { return loss(SearchPoint::from_span(x), ctx).total; };
  Rng rng(31);
  int improved = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(3);
    for (std::size_t d = 0; d < 3; ++d) x[d] = uniform_in(rng, sc.bounds.lower[d], sc.bounds.upper[d]);
    const double before = f(x);
    const RefineResult r = refine(x, f, sc.bounds, 30);
    EXPECT_LE(r.loss, before);
    EXPECT_EQ(r.loss, f(r.position));
    EXPECT_TRUE(sc.bounds.contains(r.position));
    improved += r.loss < before;
  }
  EXPECT_GT(improved, 50);
}

TEST(Optimize, DeterministicMonotoneTrace) {
  SwarmConfig c = cube_config(3, -10.0, 10.0, 4);
  c.max_iters = 50;
  const auto f = shifted_sphere({1.0, 2.0, 3.0});
  const OptimizeResult a = optimize(c, f);
  const OptimizeResult b = optimize(c, f);
  ASSERT_EQ(a.trace.size(), 50u);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].best_loss, b.trace[i].best_loss);
    EXPECT_EQ(a.trace[i].best_position, b.trace[i].best_position);
    if (i > 0) EXPECT_LE(a.trace[i].best_loss, a.trace[i - 1].best_loss);
  }
  EXPECT_LT(a.best_loss, 1e-12);
}

TEST(Optimize, NoWorseThanCoarseGridOnTwoClassLoss) {
  const FitContext ctx(sample_model({0.1, 1800.0, 1.8}, 20000, 5), 2000);
  const FitConfig fc;
  const SearchBounds sb = fc.bounds_for(ctx);
  double grid_best = kSentinelLoss;
  constexpr int kSide = 20;
  for (int i = 0; i < kSide; ++i) {
    for (int j = 0; j < kSide; ++j) {
      for (int l = 0; l < kSide; ++l) {
        const SearchPoint x{sb.p_lo + (sb.p_hi - sb.p_lo) * i / (kSide - 1.0),
                            sb.alpha_lo + (sb.alpha_hi - sb.alpha_lo) * j / (kSide - 1.0),
                            sb.t_lo + (sb.t_hi - sb.t_lo) * l / (kSide - 1.0)};
        grid_best = std::min(grid_best, loss(x, ctx).total);
      }
    }
  }
  EXPECT_LE(fit_two_class(ctx, fc, 3).loss.total, grid_best + 1e-3);
}

TEST(WriteTrace, CsvLayout) {
  const std::vector<TraceEntry> trace{{1, 0.5, {1.0, 2.0}}, {2, 0.25, {1.5, 2.5}}};
  std::ostringstream out;
  write_trace(out, trace);
  EXPECT_EQ(out.str(), "iteration,best_loss,x0,x1\n1,0.5,1,2\n2,0.25,1.5,2.5\n");
}
