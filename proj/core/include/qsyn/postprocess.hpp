#pragma once

#include <cstdint>
#include <vector>

#include "qsyn/circuit.hpp"
#include "qsyn/optimizer.hpp"
#include "qsyn/search.hpp"

namespace qsyn {

struct ResynthConfig {
  int window_cnots = 0;  // 0 selects default_window(n)
  int passes = 1;
  LeapConfig search;     // slab synthesis settings; tier and δ are set per slab
};

// 7 entanglers up to four qubits, 5 above.
int default_window(int num_qubits);

struct ResynthOutcome {
  int boundary = 0;
  int begin = 0;  // slab layers [begin, end) in the circuit at the time
  int end = 0;
  int replacement_cnots = -1;  // −1 when the slab search failed
  bool accepted = false;
};

struct ResynthResult {
  PlacedCircuit circuit;
  std::vector<ResynthOutcome> outcomes;
};

// Re-synthesizes a full-width slab around every boundary once per pass and
// splices the replacement in only if it has strictly fewer entanglers and the
// re-optimized circuit stays below ε. Throws ValidationError for a boundary
// outside [0, cnot_count].
ResynthResult resynthesize(const PlacedCircuit& circuit, const std::vector<int>& boundaries,
                           const UnitaryMatrix& target, const CouplingGraph& graph,
                           const EntanglerSet& entanglers, const ResynthConfig& config,
                           double epsilon);

struct DeletedSlot {
  int stage = 0;  // 0 is the initial layer, k the k-th entangler
  int qubit = 0;

  friend bool operator==(const DeletedSlot&, const DeletedSlot&) = default;
};

struct ReductionResult {
  PlacedCircuit circuit;
  std::vector<DeletedSlot> deleted;
};

// Sweeps the U3 slots from the start of the circuit, replacing each by the
// identity and keeping the deletion iff re-instantiation (warm local run,
// then multistart) stays below ε. Returns the input unchanged when nothing
// can be deleted. Throws ValidationError if the input is not within ε.
ReductionResult reduce_dimensionality(const PlacedCircuit& circuit, const UnitaryMatrix& target,
                                      double epsilon, const MultistartConfig& multistart = {});

}  // namespace qsyn
