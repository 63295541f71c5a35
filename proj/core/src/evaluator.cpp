#include "qsyn/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "qsyn/error.hpp"

namespace qsyn {

namespace {

// M ← (g on the qubit with bit `stride`) · M, in place.
void apply_left_1q(Complex* m, std::size_t dim, std::size_t stride, const Complex* g) {
  for (std::size_t i0 = 0; i0 < dim; ++i0) {
    if (i0 & stride) continue;
    Complex* r0 = m + i0 * dim;
    Complex* r1 = m + (i0 | stride) * dim;
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex a = r0[c];
      const Complex b = r1[c];
      r0[c] = g[0] * a + g[1] * b;
      r1[c] = g[2] * a + g[3] * b;
    }
  }
}

// M ← (g on qubits with bits stride0 (more significant) and stride1) · M.
void apply_left_2q(Complex* m, std::size_t dim, std::size_t stride0, std::size_t stride1,
                   const Complex* g) {
  const std::size_t mask = stride0 | stride1;
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    Complex* rows[4] = {m + base * dim, m + (base | stride1) * dim, m + (base | stride0) * dim,
                        m + (base | mask) * dim};
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex v0 = rows[0][c], v1 = rows[1][c], v2 = rows[2][c], v3 = rows[3][c];
      for (int l = 0; l < 4; ++l) {
        const Complex* gl = g + 4 * l;
        rows[l][c] = gl[0] * v0 + gl[1] * v1 + gl[2] * v2 + gl[3] * v3;
      }
    }
  }
}

void transpose_2x2(const Complex* g, Complex* out) {
  out[0] = g[0];
  out[1] = g[2];
  out[2] = g[1];
  out[3] = g[3];
}

void transpose_4x4(const Complex* g, Complex* out) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[4 * r + c] = g[4 * c + r];
  }
}

std::size_t stride_of(int qubit, int num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

}  // namespace

CircuitEvaluator::CircuitEvaluator(const CircuitStructure& structure, const UnitaryMatrix& target)
    : num_qubits_(structure.num_qubits()),
      dim_(std::size_t{1} << structure.num_qubits()),
      param_count_(static_cast<std::size_t>(structure.param_count())) {
  if (target.num_qubits() != num_qubits_) {
    throw SizeError("evaluator: structure has " + std::to_string(num_qubits_) +
                    " qubits, target has " + std::to_string(target.num_qubits()));
  }
  target_.assign(target.matrix().data().begin(), target.matrix().data().end());

  int offset = 0;
  auto add_single = [&](GateKind kind, int qubit) {
    if (kind != GateKind::kU3) return;
    ops_.push_back(Op{kind, qubit, -1, offset});
    offset += 3;
  };
  for (int q = 0; q < num_qubits_; ++q) add_single(structure.initial_layer()[q], q);
  for (const ExpansionLayer& layer : structure.layers()) {
    ops_.push_back(Op{layer.entangler, layer.link.first, layer.link.second, -1});
    add_single(layer.first_u3, layer.link.first);
    add_single(layer.second_u3, layer.link.second);
  }
  partials_.resize(ops_.size() + 1, std::vector<Complex>(dim_ * dim_));
  backward_.resize(dim_ * dim_);
}

void CircuitEvaluator::check_params(std::span<const double> params) const {
  if (params.size() != param_count_) {
    throw ArityError("evaluator: expected " + std::to_string(param_count_) +
                     " parameters, got " + std::to_string(params.size()));
  }
}

void CircuitEvaluator::forward(std::span<const double> params, bool keep_partials) {
  // Both modes apply the same kernels in the same order, so F_m is identical.
  std::vector<Complex>& start = keep_partials ? partials_.front() : partials_.back();
  std::fill(start.begin(), start.end(), Complex{});
  for (std::size_t i = 0; i < dim_; ++i) start[i * dim_ + i] = 1.0;

  Complex g[4];
  for (std::size_t j = 0; j < ops_.size(); ++j) {
    const Op& op = ops_[j];
    Complex* m = start.data();
    if (keep_partials) {
      partials_[j + 1] = partials_[j];
      m = partials_[j + 1].data();
    }
    if (op.kind == GateKind::kU3) {
      u3_entries(params[op.offset], params[op.offset + 1], params[op.offset + 2], g);
      apply_left_1q(m, dim_, stride_of(op.q0, num_qubits_), g);
    } else {
      apply_left_2q(m, dim_, stride_of(op.q0, num_qubits_), stride_of(op.q1, num_qubits_),
                    entangler_entries(op.kind).data());
    }
  }
}

void CircuitEvaluator::unitary(std::span<const double> params, std::span<Complex> out) {
  check_params(params);
  if (out.size() != dim_ * dim_) throw SizeError("evaluator: output buffer has wrong size");
  forward(params, false);
  std::copy(partials_.back().begin(), partials_.back().end(), out.begin());
}

double CircuitEvaluator::value(std::span<const double> params) {
  check_params(params);
  forward(params, false);
  return detail::distance_from_overlap(detail::hs_overlap(target_, partials_.back()), dim_);
}

double CircuitEvaluator::value_and_gradient(std::span<const double> params,
                                            std::span<double> gradient) {
  check_params(params);
  if (gradient.size() != param_count_) throw ArityError("evaluator: gradient has wrong size");
  forward(params, true);
  const Complex overlap = detail::hs_overlap(target_, partials_.back());
  const double value = detail::distance_from_overlap(overlap, dim_);
  const double magnitude = std::abs(overlap);

  if (magnitude == 0.0) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    return value;
  }
  // D = 1 − |c|/N  ⇒  ∂D = −Re(conj(c)·∂c) / (N·|c|).
  const Complex scale = std::conj(overlap) / (-static_cast<double>(dim_) * magnitude);

  // backward_ holds R_jᵀ where R_j = T†·G_m⋯G_{j+1}; R_mᵀ = conj(T).
  for (std::size_t k = 0; k < backward_.size(); ++k) backward_[k] = std::conj(target_[k]);

  Complex g[4], gt[4], d_theta[4], d_phi[4], d_lambda[4], gt4[16];
  for (std::size_t jj = ops_.size(); jj-- > 0;) {
    const Op& op = ops_[jj];
    const Complex* f = partials_[jj].data();  // F_{j−1}
    if (op.kind == GateKind::kU3) {
      const std::size_t s = stride_of(op.q0, num_qubits_);
      // env[a][b] = Σ_rest Σ_k F[(a,rest),k]·R[k,(b,rest)], so c = Σ env[a][b]·g[b][a].
      Complex env[4] = {};
      for (std::size_t base = 0; base < dim_; ++base) {
        if (base & s) continue;
        const Complex* fr[2] = {f + base * dim_, f + (base | s) * dim_};
        const Complex* rr[2] = {backward_.data() + base * dim_,
                                backward_.data() + (base | s) * dim_};
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            Complex acc{};
            for (std::size_t k = 0; k < dim_; ++k) acc += fr[a][k] * rr[b][k];
            env[2 * a + b] += acc;
          }
        }
      }
      const double theta = params[op.offset];
      const double phi = params[op.offset + 1];
      const double lambda = params[op.offset + 2];
      u3_gradient_entries(theta, phi, lambda, d_theta, d_phi, d_lambda);
      const Complex* derivs[3] = {d_theta, d_phi, d_lambda};
      for (int p = 0; p < 3; ++p) {
        Complex dc{};
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) dc += env[2 * a + b] * derivs[p][2 * b + a];
        }
        gradient[op.offset + p] = (scale * dc).real();
      }
      u3_entries(theta, phi, lambda, g);
      transpose_2x2(g, gt);
      apply_left_1q(backward_.data(), dim_, s, gt);
    } else {
      transpose_4x4(entangler_entries(op.kind).data(), gt4);
      apply_left_2q(backward_.data(), dim_, stride_of(op.q0, num_qubits_),
                    stride_of(op.q1, num_qubits_), gt4);
    }
  }
  return value;
}

}  // namespace qsyn
