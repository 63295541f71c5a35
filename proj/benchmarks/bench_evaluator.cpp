#include <benchmark/benchmark.h>

#include <random>

#include "qsyn/evaluator.hpp"
#include "qsyn/optimizer.hpp"
#include "qsyn/targets.hpp"

namespace {

// A layered ladder of `depth` CNOTs on a linear chain of n qubits.
qsyn::CircuitStructure ladder(int n, int depth) {
  qsyn::CircuitStructure s = qsyn::initial_structure(n);
  for (int d = 0; d < depth; ++d) {
    const int a = d % (n - 1);
    s = s.with_layer({qsyn::Link{a, a + 1}, qsyn::GateKind::kCnot});
  }
  return s;
}

std::vector<double> random_params(std::size_t k) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
  std::vector<double> p(k);
  for (double& x : p) x = u(rng);
  return p;
}

void BM_ValueAndGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), depth = static_cast<int>(state.range(1));
  const auto s = ladder(n, depth);
  qsyn::CircuitEvaluator ev(s, qsyn::qft_unitary(n));
  const auto p = random_params(ev.param_count());
  std::vector<double> g(p.size());
  for (auto _ : state) benchmark::DoNotOptimize(ev.value_and_gradient(p, g));
  state.counters["params"] = static_cast<double>(p.size());
}
BENCHMARK(BM_ValueAndGradient)->Args({3, 8})->Args({4, 16})->Args({4, 24})->Args({5, 20});

void BM_Value(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), depth = static_cast<int>(state.range(1));
  qsyn::CircuitEvaluator ev(ladder(n, depth), qsyn::qft_unitary(n));
  const auto p = random_params(ev.param_count());
  for (auto _ : state) benchmark::DoNotOptimize(ev.value(p));
}
BENCHMARK(BM_Value)->Args({3, 8})->Args({4, 16});

void BM_LocalMinimize(benchmark::State& state) {
  const auto s = ladder(3, 8);
  const auto target = qsyn::toffoli_unitary();
  const auto p = random_params(static_cast<std::size_t>(s.param_count()));
  for (auto _ : state) benchmark::DoNotOptimize(qsyn::local_minimize(s, target, p, 1e-10).value);
}
BENCHMARK(BM_LocalMinimize)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
