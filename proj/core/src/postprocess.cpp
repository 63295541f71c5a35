#include "qsyn/postprocess.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "qsyn/error.hpp"
#include "seed.hpp"

namespace qsyn {

namespace {

using SlotParams = std::vector<std::optional<std::array<double, 3>>>;

// Unpacks the parameter vector into one entry per slot (empty when deleted).
SlotParams unpack(const CircuitStructure& s, std::span<const double> params) {
  SlotParams out;
  std::size_t offset = 0;
  for (const U3Slot& slot : s.slots()) {
    if (slot.active) {
      out.push_back(std::array<double, 3>{params[offset], params[offset + 1], params[offset + 2]});
      offset += 3;
    } else {
      out.emplace_back();
    }
  }
  return out;
}

std::vector<double> pack(const SlotParams& slots) {
  std::vector<double> out;
  for (const auto& p : slots) {
    if (p) out.insert(out.end(), p->begin(), p->end());
  }
  return out;
}

ComplexMatrix u3_matrix(const std::array<double, 3>& p) { return gate_matrix(GateKind::kU3, p); }

// Slot index holding the last single-qubit gate on `qubit` before layer `layer`.
int last_slot_before(const CircuitStructure& s, int layer, int qubit) {
  const int n = s.num_qubits();
  for (int k = layer - 1; k >= 0; --k) {
    const Link& link = s.layers()[k].link;
    if (link.first == qubit) return n + 2 * k;
    if (link.second == qubit) return n + 2 * k + 1;
  }
  return qubit;
}

struct Assembled {
  CircuitStructure structure;
  std::vector<double> params;
};

// Replaces layers [begin, end) of `s` by the replacement's layers, folding its
// initial single-qubit gates into the preceding slots.
Assembled splice(const CircuitStructure& s, std::span<const double> params, int begin, int end,
                 const PlacedCircuit& replacement) {
  const int n = s.num_qubits();
  CircuitStructure out(n);
  SlotParams out_params;
  SlotParams old = unpack(s, params);
  SlotParams rep = unpack(replacement.structure, replacement.params);

  for (int q = 0; q < n; ++q) {
    out = out.with_slot(q, s.initial_layer()[q]);
    out_params.push_back(old[q]);
  }
  auto append_layer = [&](const ExpansionLayer& l, const std::optional<std::array<double, 3>>& a,
                          const std::optional<std::array<double, 3>>& b) {
    out = out.with_layer(l);
    out_params.push_back(a);
    out_params.push_back(b);
  };
  for (int k = 0; k < begin; ++k) {
    append_layer(s.layers()[k], old[n + 2 * k], old[n + 2 * k + 1]);
  }
  // Fold the replacement's leading gates into the circuit before the slab.
  for (int q = 0; q < n; ++q) {
    if (!rep[q]) continue;
    const int slot = last_slot_before(out, begin, q);
    const ComplexMatrix before =
        out_params[slot] ? u3_matrix(*out_params[slot]) : ComplexMatrix::identity(2);
    const std::array<double, 3> merged = u3_params_from_matrix(matmul(u3_matrix(*rep[q]), before));
    out = out.with_slot(slot, GateKind::kU3);
    out_params[slot] = merged;
  }
  const auto& rep_layers = replacement.structure.layers();
  for (std::size_t k = 0; k < rep_layers.size(); ++k) {
    append_layer(rep_layers[k], rep[n + 2 * k], rep[n + 2 * k + 1]);
  }
  for (int k = end; k < s.cnot_count(); ++k) {
    append_layer(s.layers()[k], old[n + 2 * k], old[n + 2 * k + 1]);
  }
  return {std::move(out), pack(out_params)};
}

}  // namespace

int default_window(int num_qubits) { return num_qubits <= 4 ? 7 : 5; }

ResynthResult resynthesize(const PlacedCircuit& circuit, const std::vector<int>& boundaries,
                           const UnitaryMatrix& target, const CouplingGraph& graph,
                           const EntanglerSet& entanglers, const ResynthConfig& config,
                           double epsilon) {
  const int n = circuit.structure.num_qubits();
  const int window = config.window_cnots > 0 ? config.window_cnots : default_window(n);
  if (config.window_cnots < 0) throw ConfigError("resynthesis window must be positive");
  if (config.passes < 0) throw ConfigError("resynthesis passes must be non-negative");
  for (int b : boundaries) {
    if (b < 0 || b > circuit.structure.cnot_count()) {
      throw ValidationError("resynthesis boundary " + std::to_string(b) + " outside [0, " +
                            std::to_string(circuit.structure.cnot_count()) + "]");
    }
  }
  std::vector<int> sorted = boundaries;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  ResynthResult result{circuit, {}};
  for (int pass = 0; pass < config.passes; ++pass) {
    int shift = 0;  // entanglers removed so far in this pass, before later boundaries
    for (int original : sorted) {
      const PlacedCircuit& current = result.circuit;
      const int total = current.structure.cnot_count();
      const int b = std::clamp(original - shift, 0, total);
      const int begin = std::max(0, b - (window + 1) / 2);
      const int end = std::min(total, b + window / 2);
      ResynthOutcome outcome{original, begin, end, -1, false};
      if (end - begin < 1) {
        result.outcomes.push_back(outcome);
        continue;
      }

      const CircuitStructure slab = current.structure.slab(begin, end);
      const UnitaryMatrix slab_unitary =
          instantiate(slab, slab_params(current.structure, current.params, begin, end));
      LeapConfig search = config.search;
      search.epsilon = epsilon;
      search.tier = InstantiationTier::kMultistart;
      search.delta = std::max(1, end - begin - 1);
      search.rng_seed = detail::mix_seed(config.search.rng_seed,
                                         static_cast<std::uint64_t>(pass * 1000003 + original));
      std::optional<PlacedCircuit> replacement;
      try {
        replacement = leap_synthesize(slab_unitary, graph, entanglers, search).circuit;
        outcome.replacement_cnots = replacement->structure.cnot_count();
      } catch (const SynthesisFailure&) {
      }

      if (replacement && replacement->structure.cnot_count() < end - begin) {
        Assembled a = splice(current.structure, current.params, begin, end, *replacement);
        OptimizerResult r = local_minimize(a.structure, target, a.params, epsilon);
        PlacedCircuit candidate = PlacedCircuit::place(a.structure, std::move(r.params), target);
        if (candidate.achieved_distance < epsilon) {
          shift += (end - begin) - replacement->structure.cnot_count();
          outcome.accepted = true;
          result.circuit = std::move(candidate);
        }
      }
      result.outcomes.push_back(outcome);
    }
  }
  return result;
}

ReductionResult reduce_dimensionality(const PlacedCircuit& circuit, const UnitaryMatrix& target,
                                      double epsilon, const MultistartConfig& multistart) {
  const PlacedCircuit checked = PlacedCircuit::place(circuit.structure, circuit.params, target);
  if (!(checked.achieved_distance <= epsilon)) {
    throw ValidationError("reduce_dimensionality: input circuit is not within epsilon");
  }

  ReductionResult result{circuit, {}};
  CircuitStructure s = circuit.structure;
  std::vector<double> params = circuit.params;
  for (const U3Slot& slot : circuit.structure.slots()) {
    if (!slot.active) continue;
    const int offset = s.param_offset(slot.index);
    CircuitStructure candidate = s.with_slot(slot.index, GateKind::kIdentity1);
    std::vector<double> x0 = params;
    x0.erase(x0.begin() + offset, x0.begin() + offset + 3);

    OptimizerResult best = local_minimize(candidate, target, x0, epsilon);
    if (!(best.value < epsilon)) {
      MultistartConfig ms = multistart;
      ms.rng_seed = detail::mix_seed(multistart.rng_seed, candidate.hash());
      MultistartResult r = multistart_minimize(candidate, target, ms, epsilon, {x0});
      if (r.value < best.value) best = std::move(r);
    }
    if (best.value < epsilon) {
      s = std::move(candidate);
      params = std::move(best.params);
      result.deleted.push_back({slot.stage, slot.qubit});
    }
  }
  if (!result.deleted.empty()) {
    result.circuit = PlacedCircuit::place(std::move(s), std::move(params), target);
  }
  return result;
}

}  // namespace qsyn
