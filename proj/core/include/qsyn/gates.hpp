#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsyn/matrix.hpp"

namespace qsyn {

enum class GateKind {
  kU3,         // general single-qubit rotation, parameters (θ, φ, λ)
  kIdentity1,  // placeholder for a deleted U3
  kCnot,
  kIswap,
  kSqrtCnot,   // principal square root of CNOT
  kSqrtIswap,  // principal square root of iSWAP
};

int param_count(GateKind kind);
int gate_arity(GateKind kind);  // 1 or 2 qubits
bool is_two_qubit(GateKind kind);

// Lower-case names used by the CLI and the QASM writer: "u3", "id", "cnot",
// "iswap", "sqcnot", "sqisw".
std::string_view gate_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);  // throws LookupError

// 2×2 or 4×4 matrix. For two-qubit gates the first qubit of the link is the
// more significant index (control for CNOT). Throws ArityError on a wrong
// parameter count.
ComplexMatrix gate_matrix(GateKind kind, std::span<const double> params = {});

// ∂M/∂params[k] for each parameter; empty for fixed gates.
std::vector<ComplexMatrix> gate_gradient(GateKind kind, std::span<const double> params = {});

// U3 entries written into a row-major 2×2 buffer; the inner loops of the
// evaluator use these to avoid allocating.
void u3_entries(double theta, double phi, double lambda, Complex out[4]);
void u3_gradient_entries(double theta, double phi, double lambda, Complex d_theta[4],
                         Complex d_phi[4], Complex d_lambda[4]);

// (θ, φ, λ) with U3(θ, φ, λ) = e^{iα}·u for some global phase α.
// `u` must be a 2×2 unitary.
std::array<double, 3> u3_params_from_matrix(const ComplexMatrix& u);

// Row-major 4×4 entries of a fixed two-qubit gate.
std::span<const Complex, 16> entangler_entries(GateKind kind);

// Non-empty, duplicate-free list of two-qubit kinds allowed during search.
class EntanglerSet {
 public:
  // Throws ConfigError when empty, duplicated, or containing one-qubit kinds.
  explicit EntanglerSet(std::vector<GateKind> kinds);

  // Comma-separated names, e.g. "cnot,iswap".
  static EntanglerSet parse(std::string_view text);
  static EntanglerSet cnot_only() { return EntanglerSet({GateKind::kCnot}); }

  const std::vector<GateKind>& kinds() const { return kinds_; }
  std::size_t size() const { return kinds_.size(); }
  std::string to_string() const;

 private:
  std::vector<GateKind> kinds_;
};

}  // namespace qsyn
