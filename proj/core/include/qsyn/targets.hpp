#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qsyn/matrix.hpp"

namespace qsyn {

struct BenchmarkSpec {
  std::string name;  // qft, toffoli, fredkin, peres, logical_or, cnot, identity, tfim
  int num_qubits = 0;
  std::map<std::string, double> parameters;  // tfim: J, h, t, steps
};

UnitaryMatrix qft_unitary(int num_qubits);
UnitaryMatrix identity_unitary(int num_qubits);
UnitaryMatrix cnot_unitary();
UnitaryMatrix toffoli_unitary();
UnitaryMatrix fredkin_unitary();
UnitaryMatrix peres_unitary();
UnitaryMatrix logical_or_unitary();

// H = −J Σ Z_i Z_{i+1} − h Σ X_i on an open chain.
ComplexMatrix tfim_hamiltonian(int num_qubits, double coupling, double field);

// exp(−iHt) exactly for steps = 0, otherwise a first-order product of
// `steps` factors exp(−iH_zz·dt)·exp(−iH_x·dt).
UnitaryMatrix tfim_unitary(int num_qubits, double coupling, double field, double time, int steps = 0);

// Permutation unitary mapping basis state |x⟩ to |f(x)⟩.
UnitaryMatrix permutation_unitary(int num_qubits, const std::vector<std::size_t>& image);

// Throws LookupError for an unknown name, ConfigError for a bad size or
// parameter.
UnitaryMatrix generate(const BenchmarkSpec& spec);

// Parses "qft3", "identity4", "tfim3", "toffoli", … with optional
// key=value parameters. Throws LookupError if the name is not a benchmark.
BenchmarkSpec parse_benchmark(std::string_view name,
                              const std::map<std::string, double>& parameters = {});

std::vector<std::string> benchmark_names();

}  // namespace qsyn
