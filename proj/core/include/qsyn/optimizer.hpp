#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "qsyn/circuit.hpp"
#include "qsyn/matrix.hpp"

namespace qsyn {

// Writes the gradient at x into `gradient` and returns the objective value.
using Objective = std::function<double(std::span<const double> x, std::span<double> gradient)>;

// Builds an independent Objective instance; one per concurrently running local
// optimization.
using ObjectiveFactory = std::function<Objective()>;

inline constexpr int kDefaultLocalEvaluations = 2000;
inline constexpr double kDefaultGradientTolerance = 1e-9;

struct LocalOptions {
  double tol = 1e-10;  // stop once the value drops below this
  int max_evaluations = kDefaultLocalEvaluations;
  double gradient_tol = kDefaultGradientTolerance;  // stop on ‖∇f‖_∞ below this
  int memory = 10;     // L-BFGS correction pairs
};

struct OptimizerResult {
  std::vector<double> params;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;  // ‖∇f‖_∞ < gradient_tol or value < tol
};

// Limited-memory BFGS with a strong-Wolfe line search. The reported value is
// the best one seen and never exceeds f(x0). Throws ValidationError when f(x0)
// is not finite.
OptimizerResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                               const LocalOptions& options);

// L-BFGS on the distance between instantiate(structure, ·) and target.
OptimizerResult local_minimize(const CircuitStructure& structure, const UnitaryMatrix& target,
                               std::vector<double> x0, double tol,
                               int max_evaluations = kDefaultLocalEvaluations);

struct MultistartConfig {
  int num_starts = 12;               // maximum local runs
  int sample_batch = 0;              // uniform samples per batch, 0 → 4·num_starts
  double initial_radius = std::numbers::pi;
  double radius_decay = 0.7;         // r_{k+1} = decay · r_k
  std::int64_t eval_budget = 200000; // total objective evaluations
  std::uint64_t rng_seed = 0;
  int local_max_evaluations = kDefaultLocalEvaluations;
  int workers = 1;                   // concurrent local runs within a batch

  int batch_size() const { return sample_batch > 0 ? sample_batch : 4 * num_starts; }
};

// Gradient max-norm above which a sampled point is not treated as a local optimum.
inline constexpr double kStationaryGradient = 1e-6;

struct LocalRunRecord {
  int batch = 0;
  double radius = 0.0;  // r_k when the run was admitted
  std::vector<double> start;
  double start_value = 0.0;
  std::vector<double> end;
  double final_value = 0.0;
  int evaluations = 0;
};

struct MultistartResult : OptimizerResult {
  std::vector<LocalRunRecord> runs;
  int samples = 0;
  double best_sample_value = 0.0;
};

// Periodic Euclidean distance on [0, 2π)^k.
double wrapped_distance(std::span<const double> a, std::span<const double> b);

// Samples batches uniformly in [0, 2π)^k and admits a local run from a point
// only if it has not started a run, its gradient max-norm exceeds
// kStationaryGradient, and no known point within r_k has a smaller value.
// `seeds` are evaluated with the first batch. Throws ConfigError on a
// non-positive budget or start count, or a decay outside (0, 1).
MultistartResult multistart_minimize(const ObjectiveFactory& make_objective, int dimension,
                                     const MultistartConfig& config, double tol,
                                     const std::vector<std::vector<double>>& seeds = {});

MultistartResult multistart_minimize(const CircuitStructure& structure,
                                     const UnitaryMatrix& target, const MultistartConfig& config,
                                     double tol,
                                     const std::vector<std::vector<double>>& seeds = {});

}  // namespace qsyn
