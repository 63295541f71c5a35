#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qsyn/error.hpp"
#include "qsyn/optimizer.hpp"

using namespace qsyn;

namespace {

Objective rosenbrock() {
  return [](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i], b = 1.0 - x[i];
      f += 100 * a * a + b * b;
      g[i] += -400 * a * x[i] - 2 * b;
      g[i + 1] += 200 * a;
    }
    return f;
  };
}

// Convex quadratic centred at c (not periodic; injected for the single-basin case).
ObjectiveFactory quadratic(std::vector<double> c) {
  return [c]() -> Objective {
    return [c](std::span<const double> x, std::span<double> g) {
      double f = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        f += (x[i] - c[i]) * (x[i] - c[i]) * (1.0 + static_cast<double>(i));
        g[i] = 2 * (x[i] - c[i]) * (1.0 + static_cast<double>(i));
      }
      return f;
    };
  };
}

// Periodic landscape with many local minima; the global minimum 0 sits at x = π.
ObjectiveFactory periodic_wells() {
  return []() -> Objective {
    return [](std::span<const double> x, std::span<double> g) {
      double f = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        f += 1.0 + std::cos(x[i]) + 0.3 * (1.0 - std::cos(3 * (x[i] - std::numbers::pi)));
        g[i] = -std::sin(x[i]) + 0.9 * std::sin(3 * (x[i] - std::numbers::pi));
      }
      return f;
    };
  };
}

}  // namespace

TEST(Lbfgs, MinimizesRosenbrock) {
  LocalOptions opts;
  opts.tol = 1e-20;
  opts.max_evaluations = 5000;
  const OptimizerResult r = lbfgs_minimize(rosenbrock(), {-1.2, 1.0, -0.5, 0.8}, opts);
  EXPECT_LT(r.value, 1e-12);
  EXPECT_NEAR(r.params[0], 1.0, 1e-5);
  EXPECT_LE(r.evaluations, 5000);
}

TEST(Lbfgs, ValueNeverExceedsStart) {
  std::mt19937_64 rng(1);
  const Objective f = periodic_wells()();
  for (int trial = 0; trial < 20; ++trial) {
    const auto x0 = oracle::random_params(5, rng);
    std::vector<double> g(5);
    const double f0 = f(x0, g);
    EXPECT_LE(lbfgs_minimize(f, x0, LocalOptions{}).value, f0);
  }
}

TEST(Lbfgs, RejectsNonFiniteStart) {
  const Objective f = [](std::span<const double>, std::span<double>) { return std::nan(""); };
  EXPECT_THROW(lbfgs_minimize(f, {1.0}, LocalOptions{}), ValidationError);
}

TEST(Lbfgs, RespectsEvaluationCap) {
  LocalOptions opts;
  opts.max_evaluations = 15;
  opts.tol = 0.0;
  EXPECT_LE(lbfgs_minimize(rosenbrock(), {-1.2, 1.0}, opts).evaluations, 15);
}

TEST(LocalMinimize, SingleQubitTargetsFromRandomStarts) {
  std::mt19937_64 rng(2);
  int success = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const UnitaryMatrix target = oracle::random_unitary(1, rng);
    // The exact optimum exists: direct parameter extraction hits it.
    const auto exact = u3_params_from_matrix(target.matrix());
    ASSERT_LT(distance(target, instantiate(initial_structure(1), exact)), 1e-14);
    const OptimizerResult r =
        local_minimize(initial_structure(1), target, oracle::random_params(3, rng), 1e-12);
    success += r.value < 1e-12;
  }
  EXPECT_GE(success, 90);
}

TEST(LocalMinimize, ReturnsImmediatelyWhenAlreadyOptimal) {
  std::mt19937_64 rng(3);
  const UnitaryMatrix target = oracle::random_unitary(1, rng);
  const auto exact = u3_params_from_matrix(target.matrix());
  const OptimizerResult r =
      local_minimize(initial_structure(1), target, std::vector<double>(exact.begin(), exact.end()), 1e-10);
  EXPECT_LE(r.evaluations, 2);
  EXPECT_TRUE(r.converged);
}

TEST(LocalMinimize, ChecksLength) {
  EXPECT_THROW(local_minimize(initial_structure(2), UnitaryMatrix::identity(2), {0.0}, 1e-10), ArityError);
}

TEST(WrappedDistance, Periodicity) {
  const double tau = 2 * std::numbers::pi;
  const std::vector<double> a{0.1, 0.0}, b{tau - 0.1, 0.0};
  EXPECT_NEAR(wrapped_distance(a, b), 0.2, 1e-12);
  EXPECT_NEAR(wrapped_distance(std::vector<double>{0.0, 0.0}, std::vector<double>{std::numbers::pi, std::numbers::pi}),
              std::numbers::pi * std::sqrt(2.0), 1e-12);
}

TEST(Multistart, ConvexQuadraticStartsExactlyOneRun) {
  MultistartConfig cfg;
  cfg.rng_seed = 5;
  const MultistartResult r = multistart_minimize(quadratic({1.0, 2.0, 3.0}), 3, cfg, 1e-12);
  EXPECT_EQ(r.runs.size(), 1u);
  EXPECT_LT(r.value, 1e-12);
  EXPECT_NEAR(r.params[2], 3.0, 1e-5);
}

TEST(Multistart, FindsGlobalMinimumOfPeriodicWells) {
  MultistartConfig cfg;
  cfg.rng_seed = 6;
  const MultistartResult r = multistart_minimize(periodic_wells(), 6, cfg, 1e-12);
  EXPECT_LT(r.value, 1e-12);
  for (double x : r.params) EXPECT_NEAR(std::remainder(x - std::numbers::pi, 2 * std::numbers::pi), 0.0, 1e-5);
}

TEST(Multistart, NeverWorseThanBestSample) {
  MultistartConfig cfg;
  cfg.num_starts = 3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.rng_seed = seed;
    const MultistartResult r = multistart_minimize(periodic_wells(), 8, cfg, 0.0);
    EXPECT_LE(r.value, r.best_sample_value);
    EXPECT_LE(static_cast<int>(r.runs.size()), 3);
  }
}

TEST(Multistart, SingleStartSingleSampleDegenerates) {
  MultistartConfig cfg;
  cfg.num_starts = 1;
  cfg.sample_batch = 1;
  cfg.rng_seed = 9;
  const MultistartResult r = multistart_minimize(periodic_wells(), 4, cfg, 0.0);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.samples, 1);
  // The run starts from the one uniform sample drawn with the seed.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
  for (double x : r.runs[0].start) EXPECT_EQ(x, u(rng));
  const OptimizerResult direct = lbfgs_minimize(periodic_wells()(), r.runs[0].start, LocalOptions{0.0});
  EXPECT_EQ(direct.value, r.value);
}

TEST(Multistart, StartConditionHoldsInRunLog) {
  MultistartConfig cfg;
  cfg.rng_seed = 10;
  cfg.num_starts = 12;
  const MultistartResult r = multistart_minimize(periodic_wells(), 5, cfg, 0.0);
  ASSERT_GE(r.runs.size(), 2u);
  // Runs admitted in the same batch never start within r_k of a better start.
  for (std::size_t i = 0; i < r.runs.size(); ++i)
    for (std::size_t j = 0; j < r.runs.size(); ++j) {
      if (i == j || r.runs[i].batch != r.runs[j].batch) continue;
      if (r.runs[j].start_value < r.runs[i].start_value) {
        EXPECT_GT(wrapped_distance(r.runs[i].start, r.runs[j].start), r.runs[i].radius);
      }
    }
  // Radii shrink geometrically across batches.
  for (const auto& run : r.runs) {
    EXPECT_NEAR(run.radius, cfg.initial_radius * std::pow(cfg.radius_decay, run.batch), 1e-12);
  }
}

TEST(Multistart, BudgetIsRespected) {
  MultistartConfig cfg;
  cfg.eval_budget = 500;
  cfg.rng_seed = 11;
  const MultistartResult r = multistart_minimize(periodic_wells(), 10, cfg, 0.0);
  EXPECT_LE(r.evaluations, 500 + cfg.batch_size());
}

TEST(Multistart, SeedsAreEvaluatedFirst) {
  MultistartConfig cfg;
  cfg.rng_seed = 12;
  std::vector<double> seed(3, std::numbers::pi);
  const MultistartResult r = multistart_minimize(periodic_wells(), 3, cfg, 1e-12, {seed});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.runs.empty());
}

TEST(Multistart, ConfigErrors) {
  MultistartConfig cfg;
  cfg.eval_budget = 0;
  EXPECT_THROW(multistart_minimize(periodic_wells(), 2, cfg, 0.0), ConfigError);
  cfg = {};
  cfg.num_starts = 0;
  EXPECT_THROW(multistart_minimize(periodic_wells(), 2, cfg, 0.0), ConfigError);
  cfg = {};
  cfg.radius_decay = 1.0;
  EXPECT_THROW(multistart_minimize(periodic_wells(), 2, cfg, 0.0), ConfigError);
  cfg = {};
  EXPECT_THROW(multistart_minimize(periodic_wells(), 2, cfg, 0.0, {{1.0}}), ArityError);
}

TEST(Multistart, ReproducibleAndWorkerIndependentPerRun) {
  std::mt19937_64 rng(13);
  const CircuitStructure s = oracle::random_structure(2, 2, rng);
  const UnitaryMatrix target = oracle::random_unitary(2, rng);
  MultistartConfig cfg;
  cfg.rng_seed = 14;
  cfg.num_starts = 4;
  const MultistartResult a = multistart_minimize(s, target, cfg, 1e-10);
  const MultistartResult b = multistart_minimize(s, target, cfg, 1e-10);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Multistart, ZeroDimensional) {
  CircuitStructure s = initial_structure(1).with_slot(0, GateKind::kIdentity1);
  const MultistartResult r = multistart_minimize(s, UnitaryMatrix::identity(1), MultistartConfig{}, 1e-10);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.evaluations, 1);
}
