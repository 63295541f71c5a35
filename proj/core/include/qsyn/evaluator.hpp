#pragma once

#include <span>
#include <vector>

#include "qsyn/circuit.hpp"
#include "qsyn/matrix.hpp"

namespace qsyn {

// Reusable workspace for evaluating one structure against one target. Keeps the
// forward partial products F_j = G_j⋯G_1 and sweeps the backward products
// once, so a gradient costs O(gates · dim²). Not thread-safe; give each
// optimization run its own instance.
class CircuitEvaluator {
 public:
  CircuitEvaluator(const CircuitStructure& structure, const UnitaryMatrix& target);

  std::size_t param_count() const { return param_count_; }
  std::size_t dim() const { return dim_; }

  // Product of all gates; `out` must hold dim² entries.
  void unitary(std::span<const double> params, std::span<Complex> out);

  double value(std::span<const double> params);

  // Writes ∂D/∂params into `gradient` and returns D.
  double value_and_gradient(std::span<const double> params, std::span<double> gradient);

 private:
  struct Op {
    GateKind kind;
    int q0;
    int q1;
    int offset;  // first parameter index, −1 for fixed gates
  };

  void check_params(std::span<const double> params) const;
  void forward(std::span<const double> params, bool keep_partials);

  int num_qubits_;
  std::size_t dim_;
  std::size_t param_count_;
  std::vector<Op> ops_;
  std::vector<Complex> target_;
  // partials_[j] holds F_j, j = 0..ops.size(); only the last is kept when
  // the gradient is not needed.
  std::vector<std::vector<Complex>> partials_;
  std::vector<Complex> backward_;
};

}  // namespace qsyn
