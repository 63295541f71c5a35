#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qsyn/circuit.hpp"
#include "qsyn/error.hpp"
#include "qsyn/gates.hpp"
#include "qsyn/optimizer.hpp"
#include "qsyn/topology.hpp"

namespace qsyn {

enum class SearchMode {
  kQSearch,  // pure A* over structures
  kLeap,     // A* with prefix formation
};

enum class InstantiationTier {
  kCheap,       // warm start plus a few random restarts
  kMultistart,  // full multistart_minimize per candidate
};

// One record of the optional search trace.
struct SearchEvent {
  enum class Type { kEvaluated, kPushed, kPopped, kPrefix, kSolved };
  Type type = Type::kEvaluated;
  int depth = 0;
  double score = 0.0;
  double priority = 0.0;
  int nodes_evaluated = 0;
  int nodes_since_prefix = 0;
  int history_size = 0;
  std::optional<double> predicted;
};

using EventSink = std::function<void(const SearchEvent&)>;

const char* event_type_name(SearchEvent::Type type);

struct LeapConfig {
  double epsilon = 1e-10;
  int delta = 0;                    // CNOT cap; 0 selects default_delta(n)
  double heuristic_weight = 10.0;
  int min_history_points = 5;
  int min_nodes_since_prefix = 10;
  SearchMode mode = SearchMode::kLeap;
  std::uint64_t rng_seed = 0;

  InstantiationTier tier = InstantiationTier::kCheap;
  int cheap_restarts = 4;
  int local_max_evaluations = kDefaultLocalEvaluations;
  MultistartConfig multistart;      // seed is overridden per candidate

  int workers = 1;                  // parallel instantiation of a successor batch
  int max_nodes = 0;                // evaluated-node budget, 0 = unlimited
  EventSink events;
};

// round(3·4^n / 8).
int default_delta(int num_qubits);

struct SearchNode {
  CircuitStructure structure;
  std::vector<double> best_params;
  double score = 1.0;   // achieved distance
  int depth = 0;        // CNOT count
  double priority = 0.0;
};

struct HistoryPoint {
  int depth;
  double score;
};

// Best-score progress: a point is kept only when it improves on the last
// score at a strictly greater depth, so depths increase and scores decrease.
class ProgressHistory {
 public:
  // Returns true if the point was appended.
  bool record(int depth, double score);
  const std::vector<HistoryPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<HistoryPoint> points_;
};

// x·a.
double heuristic(double x, double weight);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares through the history points (needs ≥ 2 distinct depths).
LineFit fit_line(const std::vector<HistoryPoint>& points);

// The fitted line evaluated at `depth`, or nullopt with fewer than
// `min_points` history entries.
std::optional<double> predict_score(const ProgressHistory& history, int depth, int min_points);

// Counters and progress shared by successive inner searches.
struct SearchState {
  ProgressHistory history;
  double best_score = 2.0;
  SearchNode best_node{CircuitStructure(1), {}, 1.0, 0, 0.0};
  int nodes_evaluated = 0;
  int nodes_expanded = 0;
  int nodes_since_prefix = 0;
};

// Instantiates `structure` against `target` with the configured tier.
// `warm_start` (padded with zeros to the structure's size) is tried first.
SearchNode evaluate_node(const CircuitStructure& structure, std::vector<double> warm_start,
                         const UnitaryMatrix& target, const LeapConfig& config);

struct InnerResult {
  SearchNode node;
  bool is_final = false;  // true: solved; false: prefix formed
};

// Thrown when the search space under δ (or the node budget) is exhausted.
class DepthLimitError : public Error {
 public:
  DepthLimitError(const std::string& what, SearchNode best)
      : Error(what), best_(std::move(best)) {}
  const SearchNode& best() const { return best_; }

 private:
  SearchNode best_;
};

// A* from `root` (already evaluated). Returns the first candidate below ε, or,
// in LEAP mode, the first new best that beats the regression prediction after
// enough evaluations since the last prefix.
InnerResult inner_synthesize(const UnitaryMatrix& target, const SearchNode& root,
                             const CouplingGraph& graph, const EntanglerSet& entanglers,
                             const LeapConfig& config, SearchState& state);

struct SynthesisReport {
  PlacedCircuit circuit{CircuitStructure(1), {}, 1.0};
  std::vector<int> prefix_boundaries;
  int nodes_expanded = 0;
  int nodes_evaluated = 0;
  double wall_time = 0.0;  // seconds
};

// Thrown by leap_synthesize on failure; carries the best-effort report.
class SynthesisFailure : public Error {
 public:
  SynthesisFailure(const std::string& what, SynthesisReport report)
      : Error(what), report_(std::move(report)) {}
  const SynthesisReport& report() const { return report_; }

 private:
  SynthesisReport report_;
};

// Outer loop: every prefix returned by inner_synthesize becomes the next root
// (structure fixed, parameters free) until a candidate reaches ε.
SynthesisReport leap_synthesize(const UnitaryMatrix& target, const CouplingGraph& graph,
                                const EntanglerSet& entanglers, const LeapConfig& config);

}  // namespace qsyn
