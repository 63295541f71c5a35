#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "qsyn/search.hpp"

namespace qsyn::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kDepthLimit = 2,
};

struct RunConfig {
  std::string target;                      // benchmark name or unitary JSON file
  std::map<std::string, double> params;    // benchmark parameters (tfim J, h, t, steps)
  std::string topology = "linear";         // linear | all | coupling-graph JSON file
  std::string gateset = "cnot";
  double epsilon = 1e-10;
  int delta = 0;                           // 0: default for the qubit count
  SearchMode mode = SearchMode::kLeap;
  double heuristic_weight = 10.0;
  int num_starts = 12;
  bool resynth = false;
  int window = 0;                          // 0: default for the qubit count
  bool reduce = false;
  std::uint64_t seed = 0;
  int workers = 1;
  int max_nodes = 0;
  std::string qasm_path;
  std::string report_path;
  std::string trace_path;
};

// Runs the synthesis pipeline and writes the requested outputs. Returns an
// ExitCode; messages go to `log`.
int run(const RunConfig& config, std::ostream& log);

// Re-parses a QASM file, instantiates it and compares against `target`.
// Returns kSuccess iff the distance is at most epsilon.
int verify(const std::string& qasm_path, const std::string& target,
           const std::map<std::string, double>& params, double epsilon, std::ostream& log);

// Benchmark name or unitary file. Throws on failure.
UnitaryMatrix load_target(const std::string& target, const std::map<std::string, double>& params);

}  // namespace qsyn::cli
