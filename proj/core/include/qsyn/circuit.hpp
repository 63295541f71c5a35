#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsyn/gates.hpp"
#include "qsyn/matrix.hpp"
#include "qsyn/topology.hpp"

namespace qsyn {

// One entangler on `link` (link.first is the more significant qubit of the
// gate, i.e. the CNOT control) followed by a U3 on each link qubit. A U3 slot
// holding kIdentity1 has been deleted by dimensionality reduction.
struct ExpansionLayer {
  Link link;
  GateKind entangler = GateKind::kCnot;
  GateKind first_u3 = GateKind::kU3;
  GateKind second_u3 = GateKind::kU3;

  friend bool operator==(const ExpansionLayer&, const ExpansionLayer&) = default;
};

// Position of a single-qubit slot. Slots are numbered in parameter packing
// order: the initial layer qubit-major, then per layer (first, second).
// Stage 0 is the initial layer, stage k ≥ 1 the k-th expansion layer.
struct U3Slot {
  int index = 0;
  int stage = 0;
  int qubit = 0;
  bool active = true;
};

// Search-tree node payload: an initial U3 per qubit followed by expansion
// layers. Circuit time runs left to right through `layers()`; as a matrix the
// later gates multiply on the left.
class CircuitStructure {
 public:
  // Initial structure: one U3 per qubit, no expansion layers.
  // Throws SizeError outside 1..kMaxQubits.
  explicit CircuitStructure(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const std::vector<GateKind>& initial_layer() const { return initial_; }
  const std::vector<ExpansionLayer>& layers() const { return layers_; }

  int param_count() const;
  int cnot_count() const { return static_cast<int>(layers_.size()); }
  int u3_count() const;
  int slot_count() const { return num_qubits_ + 2 * cnot_count(); }
  std::vector<U3Slot> slots() const;

  // Offset of the slot's first parameter in the packed vector, or −1 if the
  // slot is deleted.
  int param_offset(int slot) const;

  // Throws ValidationError for an invalid link or non-entangler kind.
  CircuitStructure with_layer(const ExpansionLayer& layer) const;
  CircuitStructure with_slot(int slot, GateKind kind) const;

  // Layers [begin, end) with an all-identity initial layer: the slab's own
  // unitary when instantiated with the matching parameters.
  CircuitStructure slab(int begin, int end) const;

  // Stable across runs and platforms; seeds per-candidate random streams.
  std::uint64_t hash() const;

  friend bool operator==(const CircuitStructure&, const CircuitStructure&) = default;

 private:
  int num_qubits_ = 0;
  std::vector<GateKind> initial_;
  std::vector<ExpansionLayer> layers_;
};

inline CircuitStructure initial_structure(int num_qubits) { return CircuitStructure(num_qubits); }

inline int cnot_count(const CircuitStructure& s) { return s.cnot_count(); }

// One child per (edge, kind), ordered by edge index then kind index.
// Throws ConfigError when the graph has no edges, SizeError on qubit mismatch.
std::vector<CircuitStructure> successors(const CircuitStructure& s, const CouplingGraph& graph,
                                         const EntanglerSet& entanglers);

// Packed parameters of the slab [begin, end) taken from the full vector.
std::vector<double> slab_params(const CircuitStructure& s, std::span<const double> params,
                                int begin, int end);

// Ordered product of gates. Throws ArityError when params.size() differs from
// s.param_count().
UnitaryMatrix instantiate(const CircuitStructure& s, std::span<const double> params);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> gradient;
};

// Distance to `target` and its gradient with respect to the packed
// parameters. Throws SizeError/ArityError on mismatched inputs.
ObjectiveValue objective_and_gradient(const CircuitStructure& s, std::span<const double> params,
                                      const UnitaryMatrix& target);

// A structure with concrete parameters and the distance they achieve.
struct PlacedCircuit {
  CircuitStructure structure;
  std::vector<double> params;
  double achieved_distance = 1.0;

  // Evaluates the distance to `target`. Throws ArityError on length mismatch.
  static PlacedCircuit place(CircuitStructure structure, std::vector<double> params,
                             const UnitaryMatrix& target);
};

// ASAP schedule length, counting every active gate as one time step.
int critical_path_depth(const CircuitStructure& s);
int gate_count(const CircuitStructure& s);
// gate_count / critical_path_depth, 0 for an empty circuit.
double parallelism(const CircuitStructure& s);

// OpenQASM 2.0 text: u3 and cx lines in time order, 17 significant digits.
// Entanglers without a qelib1 name are declared opaque with their matrix in
// a comment. Qubit 0 is the most significant bit of the basis index.
std::string to_qasm(const PlacedCircuit& c);

// Parser for text produced by to_qasm. The returned circuit's distance is left
// at 1.0 unless a target is later supplied. Throws ParseError.
PlacedCircuit parse_qasm(std::string_view text);

// JSON dump with the structure, parameters and distance.
std::string to_json(const PlacedCircuit& c);
PlacedCircuit placed_circuit_from_json(std::string_view text);

}  // namespace qsyn
