#include "qsyn/search.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <random>

#include "parallel.hpp"
#include "seed.hpp"

namespace qsyn {

namespace {

void emit(const LeapConfig& config, SearchEvent::Type type, const SearchNode& node,
          const SearchState& state, std::optional<double> predicted = std::nullopt) {
  if (!config.events) return;
  SearchEvent e;
  e.type = type;
  e.depth = node.depth;
  e.score = node.score;
  e.priority = node.priority;
  e.nodes_evaluated = state.nodes_evaluated;
  e.nodes_since_prefix = state.nodes_since_prefix;
  e.history_size = static_cast<int>(state.history.size());
  e.predicted = predicted;
  config.events(e);
}

void validate(const LeapConfig& config) {
  if (!(config.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (config.delta < 0) throw ConfigError("delta must be at least 1");
  if (!(config.heuristic_weight >= 0.0)) throw ConfigError("heuristic weight must be non-negative");
  if (config.min_history_points < 2) throw ConfigError("min_history_points must be at least 2");
  if (config.min_nodes_since_prefix < 0) throw ConfigError("min_nodes_since_prefix is negative");
  if (config.cheap_restarts < 0) throw ConfigError("cheap_restarts is negative");
  if (config.max_nodes < 0) throw ConfigError("max_nodes is negative");
}

int effective_delta(const LeapConfig& config, int num_qubits) {
  return config.delta > 0 ? config.delta : default_delta(num_qubits);
}

}  // namespace

const char* event_type_name(SearchEvent::Type type) {
  switch (type) {
    case SearchEvent::Type::kEvaluated: return "evaluated";
    case SearchEvent::Type::kPushed: return "pushed";
    case SearchEvent::Type::kPopped: return "popped";
    case SearchEvent::Type::kPrefix: return "prefix";
    case SearchEvent::Type::kSolved: return "solved";
  }
  return "?";
}

int default_delta(int num_qubits) {
  return static_cast<int>(std::lround(3.0 * std::pow(4.0, num_qubits) / 8.0));
}

bool ProgressHistory::record(int depth, double score) {
  if (!points_.empty() && (depth <= points_.back().depth || score >= points_.back().score)) {
    return false;
  }
  points_.push_back({depth, score});
  return true;
}

double heuristic(double x, double weight) { return x * weight; }

LineFit fit_line(const std::vector<HistoryPoint>& points) {
  LineFit fit;
  if (points.empty()) return fit;
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.depth;
    my += p.score;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.depth - mx) * (p.depth - mx);
    sxy += (p.depth - mx) * (p.score - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::optional<double> predict_score(const ProgressHistory& history, int depth, int min_points) {
  if (static_cast<int>(history.size()) < min_points) return std::nullopt;
  const LineFit fit = fit_line(history.points());
  return fit.intercept + fit.slope * depth;
}

SearchNode evaluate_node(const CircuitStructure& structure, std::vector<double> warm_start,
                         const UnitaryMatrix& target, const LeapConfig& config) {
  const std::size_t k = static_cast<std::size_t>(structure.param_count());
  warm_start.resize(k, 0.0);
  const std::uint64_t seed = detail::mix_seed(config.rng_seed, structure.hash());

  SearchNode node{structure, {}, 1.0, structure.cnot_count(), 0.0};
  if (config.tier == InstantiationTier::kMultistart) {
    MultistartConfig ms = config.multistart;
    ms.rng_seed = seed;
    MultistartResult r = multistart_minimize(structure, target, ms, config.epsilon, {warm_start});
    node.best_params = std::move(r.params);
    node.score = r.value;
  } else {
    OptimizerResult best =
        local_minimize(structure, target, warm_start, config.epsilon, config.local_max_evaluations);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < config.cheap_restarts && best.value >= config.epsilon; ++i) {
      std::vector<double> x(k);
      for (double& v : x) v = uniform(rng);
      OptimizerResult r =
          local_minimize(structure, target, std::move(x), config.epsilon, config.local_max_evaluations);
      if (r.value < best.value) best = std::move(r);
    }
    node.best_params = std::move(best.params);
    node.score = best.value;
  }
  node.priority = heuristic(node.score, config.heuristic_weight) + node.depth;
  return node;
}

InnerResult inner_synthesize(const UnitaryMatrix& target, const SearchNode& root,
                             const CouplingGraph& graph, const EntanglerSet& entanglers,
                             const LeapConfig& config, SearchState& state) {
  validate(config);
  if (root.structure.num_qubits() != target.num_qubits() ||
      graph.num_qubits() != target.num_qubits()) {
    throw SizeError("inner_synthesize: qubit count mismatch");
  }
  const int delta = effective_delta(config, target.num_qubits());

  struct Entry {
    double priority;
    double score;
    std::uint64_t seq;
    std::size_t index;
  };
  auto later = [](const Entry& a, const Entry& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (a.score != b.score) return a.score > b.score;
    return a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> queue(later);
  std::vector<SearchNode> nodes;
  std::uint64_t seq = 0;
  auto push = [&](SearchNode node) {
    queue.push(Entry{node.priority, node.score, seq++, nodes.size()});
    emit(config, SearchEvent::Type::kPushed, node, state);
    nodes.push_back(std::move(node));
  };
  push(root);

  while (!queue.empty()) {
    const SearchNode parent = nodes[queue.top().index];
    queue.pop();
    emit(config, SearchEvent::Type::kPopped, parent, state);
    if (parent.depth >= delta) continue;
    if (config.max_nodes > 0 && state.nodes_evaluated >= config.max_nodes) {
      throw DepthLimitError("node budget exhausted", state.best_node);
    }

    const std::vector<CircuitStructure> children = successors(parent.structure, graph, entanglers);
    std::vector<SearchNode> evaluated(children.size(), parent);
    detail::parallel_for(children.size(), config.workers, [&](std::size_t i) {
      evaluated[i] = evaluate_node(children[i], parent.best_params, target, config);
    });
    ++state.nodes_expanded;

    for (SearchNode& child : evaluated) {
      ++state.nodes_evaluated;
      ++state.nodes_since_prefix;
      const std::optional<double> predicted =
          predict_score(state.history, child.depth, config.min_history_points);
      emit(config, SearchEvent::Type::kEvaluated, child, state, predicted);
      if (child.score < config.epsilon) {
        emit(config, SearchEvent::Type::kSolved, child, state, predicted);
        return {std::move(child), true};
      }
      const bool new_best = child.score < state.best_score;
      if (new_best) {
        state.best_score = child.score;
        state.best_node = child;
        state.history.record(child.depth, child.score);
      }
      if (config.mode == SearchMode::kLeap && new_best && predicted && child.score < *predicted &&
          state.nodes_since_prefix >= config.min_nodes_since_prefix) {
        state.nodes_since_prefix = 0;
        emit(config, SearchEvent::Type::kPrefix, child, state, predicted);
        return {std::move(child), false};
      }
      if (child.depth < delta) push(std::move(child));
    }
  }
  throw DepthLimitError("no solution within " + std::to_string(delta) + " two-qubit gates",
                        state.best_node);
}

SynthesisReport leap_synthesize(const UnitaryMatrix& target, const CouplingGraph& graph,
                                const EntanglerSet& entanglers, const LeapConfig& config) {
  validate(config);
  if (graph.num_qubits() != target.num_qubits()) {
    throw SizeError("leap_synthesize: topology has " + std::to_string(graph.num_qubits()) +
                    " qubits, target has " + std::to_string(target.num_qubits()));
  }
  const auto start = std::chrono::steady_clock::now();
  SynthesisReport report;
  SearchState state;

  auto finish = [&](const SearchNode& node) {
    report.circuit = PlacedCircuit::place(node.structure, node.best_params, target);
    report.nodes_evaluated = state.nodes_evaluated;
    report.nodes_expanded = state.nodes_expanded;
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  SearchNode root = evaluate_node(initial_structure(target.num_qubits()), {}, target, config);
  state.nodes_evaluated = 1;
  state.nodes_since_prefix = 1;
  state.best_score = root.score;
  state.best_node = root;
  state.history.record(root.depth, root.score);
  emit(config, SearchEvent::Type::kEvaluated, root, state);
  if (root.score < config.epsilon) {
    emit(config, SearchEvent::Type::kSolved, root, state);
    finish(root);
    return report;
  }

  try {
    while (true) {
      InnerResult r = inner_synthesize(target, root, graph, entanglers, config, state);
      if (r.is_final) {
        finish(r.node);
        return report;
      }
      report.prefix_boundaries.push_back(r.node.depth);
      root = std::move(r.node);
    }
  } catch (const DepthLimitError& e) {
    finish(e.best());
    throw SynthesisFailure(e.what(), std::move(report));
  }
}

}  // namespace qsyn
