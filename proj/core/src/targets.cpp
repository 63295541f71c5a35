#include "qsyn/targets.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "qsyn/error.hpp"

namespace qsyn {

namespace {

constexpr Complex kI{0.0, 1.0};

// Bit of qubit q (qubit 0 most significant) in basis index x.
int bit(std::size_t x, int q, int n) { return static_cast<int>((x >> (n - 1 - q)) & 1U); }

std::size_t flip(std::size_t x, int q, int n) { return x ^ (std::size_t{1} << (n - 1 - q)); }

template <typename F>
UnitaryMatrix permutation_from(int n, F f) {
  std::vector<std::size_t> image(std::size_t{1} << n);
  for (std::size_t x = 0; x < image.size(); ++x) image[x] = f(x);
  return permutation_unitary(n, image);
}

void check_size(int n, int lo, const char* what) {
  if (n < lo || n > kMaxQubits) {
    throw ConfigError(std::string(what) + ": unsupported qubit count " + std::to_string(n));
  }
}

ComplexMatrix pauli_embed(const ComplexMatrix& p, int q, int n) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (int k = 0; k < n; ++k) out = kron(out, k == q ? p : ComplexMatrix::identity(2));
  return out;
}

}  // namespace

UnitaryMatrix permutation_unitary(int num_qubits, const std::vector<std::size_t>& image) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (image.size() != dim) throw SizeError("permutation_unitary: image has wrong size");
  ComplexMatrix m(dim);
  std::vector<bool> hit(dim, false);
  for (std::size_t x = 0; x < dim; ++x) {
    if (image[x] >= dim || hit[image[x]]) throw ValidationError("permutation_unitary: not a bijection");
    hit[image[x]] = true;
    m(image[x], x) = 1.0;
  }
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix qft_unitary(int num_qubits) {
  check_size(num_qubits, 1, "qft");
  const std::size_t dim = std::size_t{1} << num_qubits;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  ComplexMatrix m(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      // Reduce jk mod dim first so the angle stays exact for small phases.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % dim) /
                           static_cast<double>(dim);
      m(j, k) = norm * std::polar(1.0, angle);
    }
  }
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix identity_unitary(int num_qubits) {
  check_size(num_qubits, 1, "identity");
  return UnitaryMatrix::identity(num_qubits);
}

UnitaryMatrix cnot_unitary() {
  return permutation_from(2, [](std::size_t x) { return bit(x, 0, 2) ? flip(x, 1, 2) : x; });
}

UnitaryMatrix toffoli_unitary() {
  return permutation_from(3, [](std::size_t x) {
    return bit(x, 0, 3) && bit(x, 1, 3) ? flip(x, 2, 3) : x;
  });
}

UnitaryMatrix fredkin_unitary() {
  return permutation_from(3, [](std::size_t x) {
    if (!bit(x, 0, 3) || bit(x, 1, 3) == bit(x, 2, 3)) return x;
    return flip(flip(x, 1, 3), 2, 3);
  });
}

UnitaryMatrix peres_unitary() {
  // |a, b, c⟩ → |a, a⊕b, c⊕ab⟩
  return permutation_from(3, [](std::size_t x) {
    std::size_t y = x;
    if (bit(x, 0, 3) && bit(x, 1, 3)) y = flip(y, 2, 3);
    if (bit(x, 0, 3)) y = flip(y, 1, 3);
    return y;
  });
}

UnitaryMatrix logical_or_unitary() {
  // |a, b, c⟩ → |a, b, c⊕(a∨b)⟩
  return permutation_from(3, [](std::size_t x) {
    return bit(x, 0, 3) || bit(x, 1, 3) ? flip(x, 2, 3) : x;
  });
}

ComplexMatrix tfim_hamiltonian(int num_qubits, double coupling, double field) {
  check_size(num_qubits, 1, "tfim");
  const ComplexMatrix z = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  const ComplexMatrix x = ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  const std::size_t dim = std::size_t{1} << num_qubits;
  ComplexMatrix h(dim);
  for (int q = 0; q + 1 < num_qubits; ++q) {
    h -= Complex(coupling) * matmul(pauli_embed(z, q, num_qubits), pauli_embed(z, q + 1, num_qubits));
  }
  for (int q = 0; q < num_qubits; ++q) h -= Complex(field) * pauli_embed(x, q, num_qubits);
  return h;
}

UnitaryMatrix tfim_unitary(int num_qubits, double coupling, double field, double time, int steps) {
  if (steps < 0) throw ConfigError("tfim: steps must be non-negative");
  if (!std::isfinite(coupling) || !std::isfinite(field) || !std::isfinite(time)) {
    throw ConfigError("tfim: parameters must be finite");
  }
  if (steps == 0) {
    return matrix_exp_hermitian(tfim_hamiltonian(num_qubits, coupling, field), time);
  }
  const double dt = time / steps;
  const UnitaryMatrix zz = matrix_exp_hermitian(tfim_hamiltonian(num_qubits, coupling, 0.0), dt);
  const UnitaryMatrix xs = matrix_exp_hermitian(tfim_hamiltonian(num_qubits, 0.0, field), dt);
  const ComplexMatrix step = matmul(zz.matrix(), xs.matrix());
  ComplexMatrix out = ComplexMatrix::identity(std::size_t{1} << num_qubits);
  for (int i = 0; i < steps; ++i) out = matmul(step, out);
  return UnitaryMatrix(unitarize(out));
}

UnitaryMatrix generate(const BenchmarkSpec& spec) {
  auto param = [&](const std::string& key, double fallback) {
    auto it = spec.parameters.find(key);
    return it == spec.parameters.end() ? fallback : it->second;
  };
  auto fixed = [&](int n) {
    if (spec.num_qubits != 0 && spec.num_qubits != n) {
      throw ConfigError(spec.name + " acts on " + std::to_string(n) + " qubits");
    }
  };
  if (spec.name == "qft") return qft_unitary(spec.num_qubits);
  if (spec.name == "identity") return identity_unitary(spec.num_qubits);
  if (spec.name == "cnot") return fixed(2), cnot_unitary();
  if (spec.name == "toffoli") return fixed(3), toffoli_unitary();
  if (spec.name == "fredkin") return fixed(3), fredkin_unitary();
  if (spec.name == "peres") return fixed(3), peres_unitary();
  if (spec.name == "logical_or") return fixed(3), logical_or_unitary();
  if (spec.name == "tfim") {
    const double steps = param("steps", 0.0);
    if (steps < 0 || steps != std::floor(steps)) throw ConfigError("tfim: steps must be a whole number");
    return tfim_unitary(spec.num_qubits, param("J", 1.0), param("h", 1.0), param("t", 1.0),
                        static_cast<int>(steps));
  }
  throw LookupError("unknown benchmark '" + spec.name + "'");
}

BenchmarkSpec parse_benchmark(std::string_view name, const std::map<std::string, double>& parameters) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "or") lower = "logical_or";
  std::size_t split = lower.size();
  while (split > 0 && std::isdigit(static_cast<unsigned char>(lower[split - 1]))) --split;
  BenchmarkSpec spec;
  spec.name = lower.substr(0, split);
  spec.parameters = parameters;
  if (split < lower.size()) {
    if (lower.size() - split > 2) throw LookupError("unknown benchmark '" + std::string(name) + "'");
    spec.num_qubits = std::stoi(lower.substr(split));
  }
  static const std::map<std::string, int> kFixed = {{"cnot", 2},    {"toffoli", 3}, {"fredkin", 3},
                                                    {"peres", 3},   {"logical_or", 3}};
  if (auto it = kFixed.find(spec.name); it != kFixed.end()) {
    if (spec.num_qubits == 0) spec.num_qubits = it->second;
  } else if (spec.name == "qft" || spec.name == "identity" || spec.name == "tfim") {
    if (spec.num_qubits == 0) throw LookupError("benchmark '" + spec.name + "' needs a qubit count");
  } else {
    throw LookupError("unknown benchmark '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> benchmark_names() {
  return {"qft<n>", "identity<n>", "tfim<n>", "cnot", "toffoli", "fredkin", "peres", "logical_or"};
}

}  // namespace qsyn
