#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

// "key=value" pairs for benchmark parameters.
std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected key=value: " + item);
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--param", "not a number: " + item);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using qsyn::cli::RunConfig;
  CLI::App app{"qsyn: topology-aware unitary synthesis"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> params;
  std::string mode = "leap";
  auto* synth = app.add_subcommand("synth", "Synthesize a circuit for a target unitary");
  synth->add_option("-t,--target", cfg.target, "Benchmark name (qft3, toffoli, tfim3, ...) or unitary JSON file")
      ->required();
  synth->add_option("--param", params, "Benchmark parameter key=value (tfim: J, h, t, steps)");
  synth->add_option("--topology", cfg.topology, "linear | all | coupling-graph JSON file")
      ->capture_default_str();
  synth->add_option("--gateset", cfg.gateset, "Comma-separated entanglers: cnot, iswap, sqcnot, sqisw")
      ->capture_default_str();
  synth->add_option("-e,--epsilon", cfg.epsilon, "Distance threshold")->capture_default_str();
  synth->add_option("--delta", cfg.delta, "Maximum two-qubit gate count (0: 3*4^n/8)")->capture_default_str();
  synth->add_option("--mode", mode, "leap | qsearch")
      ->check(CLI::IsMember({"leap", "qsearch"}))
      ->capture_default_str();
  synth->add_option("--weight", cfg.heuristic_weight, "Heuristic weight a")->capture_default_str();
  synth->add_option("--starts", cfg.num_starts, "Multistart local runs")->capture_default_str();
  synth->add_flag("--resynth", cfg.resynth, "Re-synthesize around prefix boundaries");
  synth->add_option("--window", cfg.window, "Re-synthesis window in entanglers (0: by qubit count)")
      ->capture_default_str();
  synth->add_flag("--reduce", cfg.reduce, "Delete removable U3 gates");
  synth->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  synth->add_option("-j,--workers", cfg.workers, "Worker threads")
      ->envname("QSYN_WORKERS")
      ->capture_default_str();
  synth->add_option("--max-nodes", cfg.max_nodes, "Evaluated-node budget (0: unlimited)")
      ->capture_default_str();
  synth->add_option("-o,--qasm", cfg.qasm_path, "Write the circuit as OpenQASM 2.0");
  synth->add_option("-r,--report", cfg.report_path, "Write the JSON report");
  synth->add_option("--trace", cfg.trace_path, "Write search events as JSON lines");

  std::string qasm_path, target;
  std::vector<std::string> verify_params;
  double epsilon = 1e-10;
  auto* verify = app.add_subcommand("verify", "Check a QASM circuit against a target unitary");
  verify->add_option("qasm", qasm_path, "Circuit produced by synth")->required();
  verify->add_option("-t,--target", target, "Benchmark name or unitary JSON file")->required();
  verify->add_option("--param", verify_params, "Benchmark parameter key=value");
  verify->add_option("-e,--epsilon", epsilon, "Distance threshold")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (synth->parsed()) {
      cfg.params = parse_params(params);
      cfg.mode = mode == "qsearch" ? qsyn::SearchMode::kQSearch : qsyn::SearchMode::kLeap;
      return qsyn::cli::run(cfg, std::cerr);
    }
    return qsyn::cli::verify(qasm_path, target, parse_params(verify_params), epsilon, std::cerr);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qsyn::cli::kInputError;
  }
}
