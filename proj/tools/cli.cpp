#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "qsyn/error.hpp"
#include "qsyn/postprocess.hpp"
#include "qsyn/targets.hpp"

namespace qsyn::cli {

namespace {

using nlohmann::json;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

json config_echo(const RunConfig& c) {
  return {
      {"target", c.target},
      {"params", c.params},
      {"topology", c.topology},
      {"gateset", c.gateset},
      {"epsilon", c.epsilon},
      {"delta", c.delta},
      {"mode", c.mode == SearchMode::kLeap ? "leap" : "qsearch"},
      {"heuristic_weight", c.heuristic_weight},
      {"num_starts", c.num_starts},
      {"resynth", c.resynth},
      {"window", c.window},
      {"reduce", c.reduce},
      {"workers", c.workers},
      {"max_nodes", c.max_nodes},
  };
}

json event_json(const SearchEvent& e) {
  json j = {{"event", event_type_name(e.type)},
            {"depth", e.depth},
            {"score", e.score},
            {"priority", e.priority},
            {"nodes_evaluated", e.nodes_evaluated},
            {"nodes_since_prefix", e.nodes_since_prefix},
            {"history_size", e.history_size}};
  j["predicted"] = e.predicted ? json(*e.predicted) : json(nullptr);
  return j;
}

}  // namespace

UnitaryMatrix load_target(const std::string& target, const std::map<std::string, double>& params) {
  if (std::filesystem::is_regular_file(target)) return read_unitary_file(target);
  try {
    return generate(parse_benchmark(target, params));
  } catch (const LookupError&) {
    throw LookupError("'" + target + "' is neither a readable unitary file nor a known benchmark");
  }
}

int run(const RunConfig& config, std::ostream& log) {
  std::optional<UnitaryMatrix> target;
  std::optional<CouplingGraph> graph;
  std::optional<EntanglerSet> entanglers;
  LeapConfig leap;
  std::ofstream trace;
  try {
    if (!(config.epsilon > 0.0)) throw ConfigError("--epsilon must be positive");
    if (config.delta < 0) throw ConfigError("--delta must be positive");
    if (config.num_starts < 1) throw ConfigError("--starts must be positive");
    if (config.workers < 1) throw ConfigError("--workers must be positive");
    if (config.window < 0) throw ConfigError("--window must be positive");
    target = load_target(config.target, config.params);
    graph = CouplingGraph::resolve(config.topology, target->num_qubits());
    entanglers = EntanglerSet::parse(config.gateset);
    if (!config.trace_path.empty()) {
      trace.open(config.trace_path);
      if (!trace) throw Error("cannot write " + config.trace_path);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInputError;
  }

  leap.epsilon = config.epsilon;
  leap.delta = config.delta;
  leap.mode = config.mode;
  leap.heuristic_weight = config.heuristic_weight;
  leap.rng_seed = config.seed;
  leap.workers = config.workers;
  leap.max_nodes = config.max_nodes;
  leap.multistart.num_starts = config.num_starts;
  if (trace.is_open()) {
    leap.events = [&trace](const SearchEvent& e) { trace << event_json(e).dump() << "\n"; };
  }

  const auto start = std::chrono::steady_clock::now();
  int status = kSuccess;
  SynthesisReport report;
  try {
    report = leap_synthesize(*target, *graph, *entanglers, leap);
  } catch (const SynthesisFailure& f) {
    log << "synthesis failed: " << f.what() << "\n";
    report = f.report();
    status = kDepthLimit;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInputError;
  }

  PlacedCircuit circuit = report.circuit;
  const int cnots_before = circuit.structure.cnot_count();
  json resynth_log = json::array();
  std::vector<DeletedSlot> deleted;
  if (status == kSuccess && config.resynth) {
    ResynthConfig rc;
    rc.window_cnots = config.window;
    rc.search = leap;
    rc.search.events = nullptr;
    rc.search.max_nodes = 0;
    ResynthResult r = resynthesize(circuit, report.prefix_boundaries, *target, *graph, *entanglers,
                                   rc, config.epsilon);
    circuit = std::move(r.circuit);
    for (const ResynthOutcome& o : r.outcomes) {
      resynth_log.push_back({{"boundary", o.boundary},
                             {"begin", o.begin},
                             {"end", o.end},
                             {"replacement_cnots", o.replacement_cnots},
                             {"accepted", o.accepted}});
    }
  }
  const int u3_before = circuit.structure.u3_count();
  if (status == kSuccess && config.reduce) {
    MultistartConfig ms;
    ms.num_starts = config.num_starts;
    ms.rng_seed = config.seed;
    ReductionResult r = reduce_dimensionality(circuit, *target, config.epsilon, ms);
    circuit = std::move(r.circuit);
    deleted = std::move(r.deleted);
  }
  const CircuitStructure& s = circuit.structure;

  json deleted_json = json::array();
  for (const DeletedSlot& d : deleted) deleted_json.push_back({{"stage", d.stage}, {"qubit", d.qubit}});
  json out = {
      {"status", status == kSuccess ? "solved" : "depth_limit"},
      {"num_qubits", s.num_qubits()},
      {"cnot_count", s.cnot_count()},
      {"u3_count", s.u3_count()},
      {"depth", critical_path_depth(s)},
      {"parallelism", parallelism(s)},
      {"distance", circuit.achieved_distance},
      {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
      {"nodes_evaluated", report.nodes_evaluated},
      {"nodes_expanded", report.nodes_expanded},
      {"prefix_boundaries", report.prefix_boundaries},
      {"cnot_count_before_resynth", cnots_before},
      {"resynth", resynth_log},
      {"u3_count_before_reduce", u3_before},
      {"deleted_u3_positions", deleted_json},
      {"seed", config.seed},
      {"config", config_echo(config)},
  };

  try {
    if (!config.qasm_path.empty()) write_text(config.qasm_path, to_qasm(circuit));
    if (!config.report_path.empty()) write_text(config.report_path, out.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInputError;
  }
  log << "cnots=" << s.cnot_count() << " u3=" << s.u3_count()
      << " distance=" << circuit.achieved_distance << " nodes=" << report.nodes_evaluated << "\n";
  return status;
}

int verify(const std::string& qasm_path, const std::string& target,
           const std::map<std::string, double>& params, double epsilon, std::ostream& log) {
  try {
    const PlacedCircuit parsed = parse_qasm(read_text(qasm_path));
    const UnitaryMatrix u = load_target(target, params);
    if (u.num_qubits() != parsed.structure.num_qubits()) {
      log << "qubit count mismatch: circuit " << parsed.structure.num_qubits() << ", target "
          << u.num_qubits() << "\n";
      return kInputError;
    }
    const double d = distance(u, instantiate(parsed.structure, parsed.params));
    log << "distance=" << d << (d <= epsilon ? " ok" : " exceeds epsilon") << "\n";
    return d <= epsilon ? kSuccess : kInputError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace qsyn::cli
