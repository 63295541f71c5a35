#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qsyn/error.hpp"
#include "qsyn/search.hpp"
#include "qsyn/targets.hpp"

using namespace qsyn;

namespace {

struct Recorder {
  std::vector<SearchEvent> events;
  EventSink sink() {
    return [this](const SearchEvent& e) { events.push_back(e); };
  }
};

SynthesisReport synth(const UnitaryMatrix& target, const CouplingGraph& g, LeapConfig cfg = {},
                      const EntanglerSet& es = EntanglerSet::cnot_only()) {
  return leap_synthesize(target, g, es, cfg);
}

// Two-pass closed form from the normal equations, independent of fit_line.
LineFit normal_equations(const std::vector<HistoryPoint>& pts) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    n += 1;
    sx += p.depth;
    sy += p.score;
    sxx += static_cast<double>(p.depth) * p.depth;
    sxy += p.depth * p.score;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

TEST(Heuristic, LinearInItsArgument) {
  EXPECT_EQ(heuristic(0, 10.0), 0.0);
  EXPECT_EQ(heuristic(3, 10.0), 30.0);
  for (int d = 0; d < 10; ++d) EXPECT_LT(heuristic(d, 10.0), heuristic(d + 1, 10.0));
}

TEST(DefaultDelta, Formula) {
  EXPECT_EQ(default_delta(2), 6);
  EXPECT_EQ(default_delta(3), 24);
  EXPECT_EQ(default_delta(4), 96);
}

TEST(History, KeepsMonotonePoints) {
  ProgressHistory h;
  EXPECT_TRUE(h.record(0, 0.9));
  EXPECT_FALSE(h.record(0, 0.5));  // same depth
  EXPECT_FALSE(h.record(2, 0.95)); // not better
  EXPECT_TRUE(h.record(2, 0.5));
  EXPECT_EQ(h.size(), 2u);
}

TEST(PredictScore, ExactLine) {
  ProgressHistory h;
  for (int d = 1; d <= 5; ++d) h.record(d, 1.0 - 0.1 * d);
  const auto p = predict_score(h, 6, 5);
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR(*p, 0.4, 1e-12);
}

TEST(PredictScore, GatedByHistorySize) {
  ProgressHistory h;
  h.record(1, 0.9);
  h.record(2, 0.8);
  EXPECT_FALSE(predict_score(h, 3, 5).has_value());
  EXPECT_TRUE(predict_score(h, 3, 2).has_value());
}

TEST(PredictScore, MatchesNormalEquationsOnRandomHistories) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<HistoryPoint> pts;
    int d = 0;
    double s = 1.0;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      d += 1 + static_cast<int>(rng() % 3);
      s *= u(rng);
      pts.push_back({d, s});
    }
    const LineFit a = fit_line(pts), b = normal_equations(pts);
    EXPECT_NEAR(a.slope, b.slope, 1e-12);
    EXPECT_NEAR(a.intercept, b.intercept, 1e-12);
  }
}

TEST(Search, IdentityTargetSolvedAtRoot) {
  Recorder rec;
  LeapConfig cfg;
  cfg.events = rec.sink();
  const SynthesisReport r = synth(identity_unitary(3), CouplingGraph::linear(3), cfg);
  EXPECT_EQ(r.circuit.structure.cnot_count(), 0);
  EXPECT_EQ(r.nodes_expanded, 0);
  EXPECT_EQ(r.nodes_evaluated, 1);
  EXPECT_EQ(r.circuit.achieved_distance, 0.0);
  for (double p : r.circuit.params) EXPECT_EQ(p, 0.0);
}

TEST(Search, CnotSolvedAtDepthOne) {
  const SynthesisReport r = synth(cnot_unitary(), CouplingGraph::linear(2));
  EXPECT_EQ(r.circuit.structure.cnot_count(), 1);
  EXPECT_LE(r.nodes_evaluated, 2);
  EXPECT_LT(r.circuit.achieved_distance, 1e-10);
}

TEST(Search, RandomTwoQubitUnitariesNeedAtMostThreeCnots) {
  std::mt19937_64 rng(2);
  LeapConfig cfg;
  cfg.mode = SearchMode::kQSearch;
  for (int trial = 0; trial < 20; ++trial) {
    cfg.rng_seed = trial;
    const UnitaryMatrix target = oracle::random_unitary(2, rng);
    const SynthesisReport r = synth(target, CouplingGraph::linear(2), cfg);
    EXPECT_LE(r.circuit.structure.cnot_count(), 3);
    EXPECT_LT(distance(target, instantiate(r.circuit.structure, r.circuit.params)), 1e-10);
  }
}

TEST(Search, ToffoliLinearEightCnotsWithPrefixes) {
  Recorder rec;
  LeapConfig cfg;
  cfg.rng_seed = 0;
  cfg.events = rec.sink();
  const SynthesisReport r = synth(toffoli_unitary(), CouplingGraph::linear(3), cfg);
  EXPECT_LE(r.circuit.structure.cnot_count(), 9);
  EXPECT_LT(r.circuit.achieved_distance, 1e-10);
  EXPECT_EQ(r.circuit.achieved_distance, distance(toffoli_unitary(), instantiate(r.circuit.structure, r.circuit.params)));

  // Boundaries strictly increasing and within the final circuit.
  for (std::size_t i = 1; i < r.prefix_boundaries.size(); ++i) {
    EXPECT_LT(r.prefix_boundaries[i - 1], r.prefix_boundaries[i]);
  }
  if (!r.prefix_boundaries.empty()) {
    EXPECT_LE(r.prefix_boundaries.back(), r.circuit.structure.cnot_count());
  }

  // Every prefix event happens only after enough history and evaluations.
  int prefixes = 0;
  for (const SearchEvent& e : rec.events) {
    if (e.type != SearchEvent::Type::kPrefix) continue;
    ++prefixes;
    EXPECT_GE(e.history_size, cfg.min_history_points);
    ASSERT_TRUE(e.predicted.has_value());
    EXPECT_LT(e.score, *e.predicted);
  }
  EXPECT_EQ(prefixes, static_cast<int>(r.prefix_boundaries.size()));
  // nodes_since_prefix reached the threshold before each reset.
  int since = 0;
  for (const SearchEvent& e : rec.events) {
    if (e.type == SearchEvent::Type::kEvaluated) ++since;
    if (e.type == SearchEvent::Type::kPrefix) {
      EXPECT_GE(since, cfg.min_nodes_since_prefix);
      since = 0;
    }
  }
  // Popped priorities follow the A* definition.
  for (const SearchEvent& e : rec.events) {
    if (e.type == SearchEvent::Type::kPopped) {
      EXPECT_DOUBLE_EQ(e.priority, heuristic(e.score, cfg.heuristic_weight) + e.depth);
    }
  }
}

TEST(Search, QSearchNeverFormsPrefixes) {
  Recorder rec;
  LeapConfig cfg;
  cfg.mode = SearchMode::kQSearch;
  cfg.events = rec.sink();
  const SynthesisReport r = synth(peres_unitary(), CouplingGraph::all_to_all(3), cfg);
  EXPECT_TRUE(r.prefix_boundaries.empty());
  for (const SearchEvent& e : rec.events) EXPECT_NE(e.type, SearchEvent::Type::kPrefix);
  EXPECT_LT(r.circuit.achieved_distance, 1e-10);
}

TEST(Search, LeapEvaluatesNoMoreNodesThanQSearch) {
  for (const auto& target : {toffoli_unitary(), logical_or_unitary()}) {
    LeapConfig cfg;
    cfg.rng_seed = 3;
    const SynthesisReport leap = synth(target, CouplingGraph::linear(3), cfg);
    cfg.mode = SearchMode::kQSearch;
    const SynthesisReport qs = synth(target, CouplingGraph::linear(3), cfg);
    EXPECT_LE(leap.nodes_evaluated, qs.nodes_evaluated);
  }
}

TEST(Search, DeterministicAcrossRunsAndWorkerCounts) {
  LeapConfig cfg;
  cfg.rng_seed = 4;
  const SynthesisReport a = synth(peres_unitary(), CouplingGraph::linear(3), cfg);
  const SynthesisReport b = synth(peres_unitary(), CouplingGraph::linear(3), cfg);
  cfg.workers = 3;
  const SynthesisReport c = synth(peres_unitary(), CouplingGraph::linear(3), cfg);
  for (const SynthesisReport* o : {&b, &c}) {
    EXPECT_EQ(o->circuit.structure, a.circuit.structure);
    EXPECT_EQ(o->circuit.params, a.circuit.params);
    EXPECT_EQ(o->nodes_evaluated, a.nodes_evaluated);
    EXPECT_EQ(o->prefix_boundaries, a.prefix_boundaries);
  }
}

TEST(Search, DepthLimitCarriesBestEffort) {
  LeapConfig cfg;
  cfg.delta = 2;
  try {
    synth(toffoli_unitary(), CouplingGraph::linear(3), cfg);
    FAIL() << "expected a depth-limit failure";
  } catch (const SynthesisFailure& f) {
    EXPECT_LE(f.report().circuit.structure.cnot_count(), 2);
    EXPECT_GT(f.report().circuit.achieved_distance, 1e-10);
    EXPECT_GT(f.report().nodes_evaluated, 1);
  }
}

TEST(Search, NodeBudget) {
  LeapConfig cfg;
  cfg.max_nodes = 5;
  cfg.mode = SearchMode::kQSearch;
  EXPECT_THROW(synth(toffoli_unitary(), CouplingGraph::linear(3), cfg), SynthesisFailure);
}

TEST(Search, ConfigAndSizeErrors) {
  LeapConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_THROW(synth(cnot_unitary(), CouplingGraph::linear(2), cfg), ConfigError);
  cfg = {};
  cfg.min_history_points = 1;
  EXPECT_THROW(synth(cnot_unitary(), CouplingGraph::linear(2), cfg), ConfigError);
  EXPECT_THROW(synth(cnot_unitary(), CouplingGraph::linear(3)), SizeError);
}

TEST(Search, AlternativeEntanglers) {
  LeapConfig cfg;
  const SynthesisReport r = synth(UnitaryMatrix(gate_matrix(GateKind::kIswap)), CouplingGraph::linear(2), cfg,
                                  EntanglerSet::parse("sqisw"));
  EXPECT_EQ(r.circuit.structure.cnot_count(), 2);
  EXPECT_EQ(r.circuit.structure.layers()[0].entangler, GateKind::kSqrtIswap);
}
