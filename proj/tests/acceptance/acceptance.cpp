// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.
//
//   qsyn_acceptance [--criterion N]... [--verbose]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qsyn/evaluator.hpp"
#include "qsyn/postprocess.hpp"
#include "qsyn/targets.hpp"

using namespace qsyn;
using nlohmann::json;

namespace {

constexpr double kEps = 1e-10;
bool verbose = false;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(const std::string& line) {
  if (verbose) std::cerr << "  " << line << std::endl;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CouplingGraph topology(const std::string& name, int n) { return CouplingGraph::resolve(name, n); }

LeapConfig leap_config(std::uint64_t seed, SearchMode mode = SearchMode::kLeap) {
  LeapConfig c;
  c.rng_seed = seed;
  c.mode = mode;
  return c;
}

ResynthResult resynth(const SynthesisReport& r, const UnitaryMatrix& target, const CouplingGraph& g,
                      std::uint64_t seed) {
  ResynthConfig rc;
  rc.search = leap_config(seed);
  return resynthesize(r.circuit, r.prefix_boundaries, target, g, EntanglerSet::cnot_only(), rc, kEps);
}

struct SuiteEntry {
  std::string target;
  std::string topology;
  int expected;
};

const std::vector<SuiteEntry> kSuite = {
    {"toffoli", "linear", 8}, {"fredkin", "linear", 8}, {"qft3", "linear", 8},
    {"peres", "linear", 7},   {"logical_or", "linear", 8}, {"qft3", "all", 7},
    {"peres", "all", 5},
};

Outcome criterion1() {
  Outcome o;
  int worst_before = -99, worst_after = -99;
  double slowest = 0.0;
  for (const SuiteEntry& e : kSuite) {
    const UnitaryMatrix target = generate(parse_benchmark(e.target));
    const CouplingGraph g = topology(e.topology, target.num_qubits());
    const auto t0 = std::chrono::steady_clock::now();
    const SynthesisReport r = leap_synthesize(target, g, EntanglerSet::cnot_only(), leap_config(0));
    const ResynthResult rr = resynth(r, target, g, 0);
    const double secs = seconds_since(t0);
    const int before = r.circuit.structure.cnot_count(), after = rr.circuit.structure.cnot_count();
    const double d = std::max(r.circuit.achieved_distance, rr.circuit.achieved_distance);
    note(fmt("%s/%s: %d -> %d CNOTs (expected %d), distance %.2e, %.1fs", e.target.c_str(), e.topology.c_str(),
             before, after, e.expected, d, secs));
    worst_before = std::max(worst_before, before - e.expected);
    worst_after = std::max(worst_after, after - e.expected);
    slowest = std::max(slowest, secs);
    if (before > e.expected + 1 || after > e.expected || !(d < kEps) || secs > 300.0) o.pass = false;
  }
  o.detail = fmt("max excess before resynth %+d (tol +1), after %+d (tol 0), slowest %.1fs", worst_before,
                 worst_after, slowest);
  return o;
}

SynthesisReport qft4(std::uint64_t seed, SearchMode mode, int max_nodes = 0) {
  LeapConfig cfg = leap_config(seed, mode);
  cfg.max_nodes = max_nodes;
  return leap_synthesize(qft_unitary(4), CouplingGraph::linear(4), EntanglerSet::cnot_only(), cfg);
}

// Plain A* on QFT4 grows roughly geometrically per CNOT level and does not
// finish in hours, so its arm runs under a node budget of 4x the LEAP count.
// Hitting the budget unsolved proves its final count exceeds the budget,
// which bounds the ratio from above.
Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const SynthesisReport leap = qft4(0, SearchMode::kLeap);
  note(fmt("leap: %d nodes, %d CNOTs, %.0fs", leap.nodes_evaluated, leap.circuit.structure.cnot_count(),
           seconds_since(t0)));
  const int budget = 4 * leap.nodes_evaluated;
  const auto t1 = std::chrono::steady_clock::now();
  int qs_nodes = 0;
  bool bound = false;
  try {
    const SynthesisReport qs = qft4(0, SearchMode::kQSearch, budget);
    qs_nodes = qs.nodes_evaluated;
    note(fmt("qsearch: solved with %d nodes, %d CNOTs", qs_nodes, qs.circuit.structure.cnot_count()));
  } catch (const SynthesisFailure& f) {
    qs_nodes = f.report().nodes_evaluated;
    bound = qs_nodes >= budget;
    note(fmt("qsearch: %s after %d nodes, best distance %.3f at %d CNOTs", f.what(), qs_nodes,
             f.report().circuit.achieved_distance, f.report().circuit.structure.cnot_count()));
  }
  const double qs_secs = seconds_since(t1);
  const double ratio = static_cast<double>(leap.nodes_evaluated) / qs_nodes;
  return {ratio <= 0.5 && qs_secs <= 7200.0,
          fmt("qft4 nodes leap %d / qsearch %s%d = %s%.3f (need <= 0.5), qsearch %.0fs", leap.nodes_evaluated,
              bound ? ">=" : "", qs_nodes, bound ? "<=" : "", ratio, qs_secs)};
}

Outcome criterion3() {
  int improved = 0, increased = 0;
  std::string counts;
  const UnitaryMatrix target = qft_unitary(4);
  const CouplingGraph g = CouplingGraph::linear(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const SynthesisReport r = qft4(seed, SearchMode::kLeap);
    const ResynthResult rr = resynth(r, target, g, seed);
    const int before = r.circuit.structure.cnot_count(), after = rr.circuit.structure.cnot_count();
    note(fmt("seed %d: %d -> %d CNOTs, boundaries %zu, distance %.2e, %.0fs", static_cast<int>(seed), before,
             after, r.prefix_boundaries.size(), rr.circuit.achieved_distance, seconds_since(t0)));
    improved += after < before;
    increased += after > before || !(rr.circuit.achieved_distance < kEps);
    counts += (counts.empty() ? "" : " ") + std::to_string(before) + "->" + std::to_string(after);
  }
  return {improved >= 3 && increased == 0,
          fmt("qft4 reduced in %d/5 runs (need >= 3), increased in %d: %s", improved, increased, counts.c_str())};
}

Outcome criterion4() {
  Outcome o;
  int total_u3 = 0, total_deleted = 0, min_deleted = 1 << 30;
  for (const SuiteEntry& e : kSuite) {
    if (e.topology != "linear") continue;
    const UnitaryMatrix target = generate(parse_benchmark(e.target));
    const SynthesisReport r =
        leap_synthesize(target, CouplingGraph::linear(3), EntanglerSet::cnot_only(), leap_config(0));
    MultistartConfig ms;
    const ReductionResult red = reduce_dimensionality(r.circuit, target, kEps, ms);
    const int deleted = static_cast<int>(red.deleted.size());
    const double d = distance(target, instantiate(red.circuit.structure, red.circuit.params));
    note(fmt("%s: deleted %d of %d U3, distance %.2e", e.target.c_str(), deleted, r.circuit.structure.u3_count(), d));
    total_u3 += r.circuit.structure.u3_count();
    total_deleted += deleted;
    min_deleted = std::min(min_deleted, deleted);
    if (!(d < kEps) || red.circuit.structure.cnot_count() != r.circuit.structure.cnot_count()) o.pass = false;
  }
  const double frac = static_cast<double>(total_deleted) / total_u3;
  o.pass = o.pass && frac >= 0.15 && min_deleted >= 1;
  o.detail = fmt("deleted %d/%d U3 (%.1f%%, need >= 15%%), min per circuit %d (need >= 1)", total_deleted, total_u3,
                 100 * frac, min_deleted);
  return o;
}

Outcome criterion5() {
  const UnitaryMatrix target = qft_unitary(3);
  const CircuitStructure s =
      leap_synthesize(target, CouplingGraph::linear(3), EntanglerSet::cnot_only(), leap_config(0)).circuit.structure;
  constexpr int kTrials = 50;
  const std::size_t k = static_cast<std::size_t>(s.param_count());
  int single = 0;
  for (int t = 0; t < kTrials; ++t) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(t));
    single += local_minimize(s, target, oracle::random_params(k, rng), kEps).value < kEps;
  }
  std::vector<int> rates;
  for (int starts : {8, 12, 24}) {
    int ok = 0;
    MultistartConfig cfg;
    cfg.num_starts = starts;
    for (int t = 0; t < kTrials; ++t) {
      cfg.rng_seed = static_cast<std::uint64_t>(t);
      ok += multistart_minimize(s, target, cfg, kEps).value < kEps;
    }
    rates.push_back(100 * ok / kTrials);
  }
  const int single_rate = 100 * single / kTrials;
  int inversions = 0, worst = 0;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] < rates[i - 1]) {
      ++inversions;
      worst = std::max(worst, rates[i - 1] - rates[i]);
    }
  }
  const bool pass = rates[1] >= 80 && rates[1] > single_rate && inversions <= 1 && worst <= 5;
  return {pass, fmt("qft3 (%d CNOTs) success: single %d%%, 8 starts %d%%, 12 starts %d%% (need >= 80), 24 starts %d%%",
                    s.cnot_count(), single_rate, rates[0], rates[1], rates[2])};
}

const std::vector<double> kTfimTimes = {0.25, 0.5, 1.0, 2.0, 4.0};

Outcome criterion6() {
  std::vector<int> counts;
  for (double t : kTfimTimes) {
    const UnitaryMatrix target = tfim_unitary(3, 1.0, 1.0, t);
    const auto t0 = std::chrono::steady_clock::now();
    const SynthesisReport r =
        leap_synthesize(target, CouplingGraph::linear(3), EntanglerSet::cnot_only(), leap_config(0));
    note(fmt("t=%.2f: %d CNOTs, distance %.2e, %.0fs", t, r.circuit.structure.cnot_count(),
             r.circuit.achieved_distance, seconds_since(t0)));
    counts.push_back(r.circuit.structure.cnot_count());
  }
  // Non-increasing after the peak; the last three within one CNOT.
  const auto peak = std::max_element(counts.begin(), counts.end());
  const bool settles = std::is_sorted(peak, counts.end(), std::greater<>());
  const auto [lo, hi] = std::minmax_element(counts.end() - 3, counts.end());
  std::string list;
  for (int c : counts) list += (list.empty() ? "" : ",") + std::to_string(c);
  return {settles && *hi - *lo <= 1, "tfim3 CNOTs at t=0.25..4: " + list};
}

Outcome criterion7() {
  Outcome o;
  std::vector<std::string> failures;
  // Gate matrices.
  double unitarity = 0.0;
  std::mt19937_64 rng(7);
  for (GateKind k : {GateKind::kU3, GateKind::kIdentity1, GateKind::kCnot, GateKind::kIswap, GateKind::kSqrtCnot,
                     GateKind::kSqrtIswap}) {
    for (int i = 0; i < 20; ++i) {
      const auto p = oracle::random_params(static_cast<std::size_t>(param_count(k)), rng);
      unitarity = std::max(unitarity, unitarity_error(gate_matrix(k, p)));
    }
  }
  if (!(unitarity <= 1e-12)) failures.push_back("unitarity");

  // Instantiation against the brute-force oracle, gradients against finite differences.
  double inst = 0.0, grad = 0.0;
  const std::vector<GateKind> kinds = {GateKind::kCnot, GateKind::kIswap, GateKind::kSqrtCnot, GateKind::kSqrtIswap};
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    const CircuitStructure s = oracle::random_structure(n, n == 1 ? 0 : 1 + trial % 6, rng, kinds);
    const auto p = oracle::random_params(static_cast<std::size_t>(s.param_count()), rng);
    inst = std::max(inst, oracle::max_diff(oracle::instantiate(s, p), instantiate(s, p).matrix()));
    const UnitaryMatrix target = oracle::random_unitary(n, rng);
    CircuitEvaluator ev(s, target);
    std::vector<double> g(p.size());
    ev.value_and_gradient(p, g);
    const auto fd = oracle::central_difference([&](const std::vector<double>& x) { return ev.value(x); }, p);
    for (std::size_t i = 0; i < g.size(); ++i) grad = std::max(grad, std::abs(g[i] - fd[i]));
  }
  if (!(inst <= 1e-11)) failures.push_back("instantiate");
  if (!(grad <= 1e-5)) failures.push_back("gradient");

  // Emitted circuits verify; reports reproduce bit-for-bit.
  const auto dir = std::filesystem::temp_directory_path();
  int verified = 0, total = 0;
  bool reproducible = true;
  for (const std::string target : {"identity3", "cnot", "qft2", "toffoli", "peres", "tfim3"}) {
    std::string reports[2], qasm[2];
    for (int rep = 0; rep < 2; ++rep) {
      cli::RunConfig c;
      c.target = target;
      c.seed = 11;
      c.workers = 1;
      c.resynth = c.reduce = true;
      c.qasm_path = (dir / ("qsyn_acc_" + target + std::to_string(rep) + ".qasm")).string();
      c.report_path = (dir / ("qsyn_acc_" + target + std::to_string(rep) + ".json")).string();
      std::ostringstream log;
      if (cli::run(c, log) != cli::kSuccess) failures.push_back("run " + target);
      ++total;
      verified += cli::verify(c.qasm_path, target, {}, kEps, log) == cli::kSuccess;
      std::ifstream rin(c.report_path), qin(c.qasm_path);
      json j = json::parse(rin);
      j.erase("wall_time_s");
      reports[rep] = j.dump();
      std::stringstream q;
      q << qin.rdbuf();
      qasm[rep] = q.str();
    }
    reproducible = reproducible && reports[0] == reports[1] && qasm[0] == qasm[1];
  }
  if (verified != total) failures.push_back("verify");
  if (!reproducible) failures.push_back("reproducibility");

  o.pass = failures.empty();
  o.detail = fmt("unitarity %.1e, instantiate %.1e, gradient %.1e, verified %d/%d, reproducible %s", unitarity, inst,
                 grad, verified, total, reproducible ? "yes" : "no");
  for (const auto& f : failures) o.detail += "; failed: " + f;
  return o;
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const SynthesisReport r = leap_synthesize(toffoli_unitary(), CouplingGraph::all_to_all(3),
                                            EntanglerSet::parse("cnot,sqcnot"), leap_config(0));
  const double secs = seconds_since(t0);
  int sq = 0;
  for (const ExpansionLayer& l : r.circuit.structure.layers()) sq += l.entangler == GateKind::kSqrtCnot;
  const int total = r.circuit.structure.cnot_count();
  return {total <= 6 && r.circuit.achieved_distance < kEps && secs <= 1800.0,
          fmt("toffoli {cnot,sqcnot}: %d two-qubit gates (%d sqcnot; need <= 6), distance %.1e, %.0fs", total, sq,
              r.circuit.achieved_distance, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsyn acceptance checks"};
  std::vector<int> selected;
  app.add_option("-c,--criterion", selected, "criterion number (repeatable); default all")->check(CLI::Range(1, 8));
  app.add_flag("-v,--verbose", verbose, "per-case details on stderr");
  std::vector<int> known_red;
  app.add_option("--known-red", known_red, "criterion expected to fail; exits 77 if only these fail")
      ->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8};
  bool all = true, unexpected = false;
  for (int id : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = std::find(known_red.begin(), known_red.end(), id) != known_red.end();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : known ? "FAIL (known)" : "FAIL") << " — " << o.detail
              << fmt(" [%.0fs]", seconds_since(t0)) << std::endl;
    all = all && o.pass;
    unexpected = unexpected || (!o.pass && !known);
  }
  if (all) return 0;
  return unexpected ? 1 : 77;
}
