#include "qsyn/gates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "qsyn/error.hpp"

namespace qsyn {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kInvSqrt2 = 0.70710678118654752440;

constexpr std::array<Complex, 16> kCnot = {
    1, 0, 0, 0,  //
    0, 1, 0, 0,  //
    0, 0, 0, 1,  //
    0, 0, 1, 0,
};

constexpr std::array<Complex, 16> kIswap = {
    1, 0,  0,  0,  //
    0, 0,  kI, 0,  //
    0, kI, 0,  0,  //
    0, 0,  0,  1,
};

// diag(I, √X) with √X = ½[[1+i, 1−i], [1−i, 1+i]], the principal root.
constexpr std::array<Complex, 16> kSqrtCnot = {
    1, 0, 0,                   0,                   //
    0, 1, 0,                   0,                   //
    0, 0, Complex{0.5, 0.5},   Complex{0.5, -0.5},  //
    0, 0, Complex{0.5, -0.5},  Complex{0.5, 0.5},
};

constexpr std::array<Complex, 16> kSqrtIswap = {
    1, 0,                        0,                        0,  //
    0, kInvSqrt2,                Complex{0.0, kInvSqrt2},  0,  //
    0, Complex{0.0, kInvSqrt2},  kInvSqrt2,                0,  //
    0, 0,                        0,                        1,
};

void check_arity(GateKind kind, std::span<const double> params) {
  if (static_cast<int>(params.size()) != param_count(kind)) {
    throw ArityError(std::string(gate_name(kind)) + ": expected " +
                     std::to_string(param_count(kind)) + " parameters, got " +
                     std::to_string(params.size()));
  }
}

ComplexMatrix from_buffer(std::size_t dim, const Complex* entries) {
  return ComplexMatrix(dim, std::vector<Complex>(entries, entries + dim * dim));
}

}  // namespace

int param_count(GateKind kind) { return kind == GateKind::kU3 ? 3 : 0; }

int gate_arity(GateKind kind) {
  return kind == GateKind::kU3 || kind == GateKind::kIdentity1 ? 1 : 2;
}

bool is_two_qubit(GateKind kind) { return gate_arity(kind) == 2; }

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::kU3: return "u3";
    case GateKind::kIdentity1: return "id";
    case GateKind::kCnot: return "cnot";
    case GateKind::kIswap: return "iswap";
    case GateKind::kSqrtCnot: return "sqcnot";
    case GateKind::kSqrtIswap: return "sqisw";
  }
  return "?";
}

GateKind gate_kind_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "u3") return GateKind::kU3;
  if (lower == "id" || lower == "identity") return GateKind::kIdentity1;
  if (lower == "cnot" || lower == "cx") return GateKind::kCnot;
  if (lower == "iswap") return GateKind::kIswap;
  if (lower == "sqcnot" || lower == "csx") return GateKind::kSqrtCnot;
  if (lower == "sqisw" || lower == "sqiswap") return GateKind::kSqrtIswap;
  throw LookupError("unknown gate kind '" + std::string(name) + "'");
}

void u3_entries(double theta, double phi, double lambda, Complex out[4]) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const Complex el = std::polar(1.0, lambda);
  const Complex ep = std::polar(1.0, phi);
  out[0] = c;
  out[1] = -el * s;
  out[2] = ep * s;
  out[3] = el * ep * c;
}

void u3_gradient_entries(double theta, double phi, double lambda, Complex d_theta[4],
                         Complex d_phi[4], Complex d_lambda[4]) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const Complex el = std::polar(1.0, lambda);
  const Complex ep = std::polar(1.0, phi);
  const Complex elp = el * ep;

  d_theta[0] = -0.5 * s;
  d_theta[1] = -0.5 * el * c;
  d_theta[2] = 0.5 * ep * c;
  d_theta[3] = -0.5 * elp * s;

  d_phi[0] = 0.0;
  d_phi[1] = 0.0;
  d_phi[2] = kI * ep * s;
  d_phi[3] = kI * elp * c;

  d_lambda[0] = 0.0;
  d_lambda[1] = -kI * el * s;
  d_lambda[2] = 0.0;
  d_lambda[3] = kI * elp * c;
}

std::array<double, 3> u3_params_from_matrix(const ComplexMatrix& u) {
  if (u.dim() != 2) throw SizeError("u3_params_from_matrix: expected a 2x2 matrix");
  const double c = std::abs(u(0, 0));
  const double s = std::abs(u(1, 0));
  const double theta = 2.0 * std::atan2(s, c);
  constexpr double kTiny = 1e-14;
  if (s < kTiny) {
    // Diagonal: only φ + λ matters.
    return {theta, 0.0, std::arg(u(1, 1) / u(0, 0))};
  }
  if (c < kTiny) {
    // Anti-diagonal: choose the phase so that U[1][0] has φ and −U[0][1] has λ.
    return {theta, std::arg(u(1, 0)), std::arg(-u(0, 1))};
  }
  const Complex phase = u(0, 0) / c;
  return {theta, std::arg(u(1, 0) / phase), std::arg(-u(0, 1) / phase)};
}

std::span<const Complex, 16> entangler_entries(GateKind kind) {
  switch (kind) {
    case GateKind::kCnot: return kCnot;
    case GateKind::kIswap: return kIswap;
    case GateKind::kSqrtCnot: return kSqrtCnot;
    case GateKind::kSqrtIswap: return kSqrtIswap;
    default: break;
  }
  throw ConfigError(std::string(gate_name(kind)) + " is not a two-qubit gate");
}

ComplexMatrix gate_matrix(GateKind kind, std::span<const double> params) {
  check_arity(kind, params);
  switch (kind) {
    case GateKind::kU3: {
      Complex m[4];
      u3_entries(params[0], params[1], params[2], m);
      return from_buffer(2, m);
    }
    case GateKind::kIdentity1: return ComplexMatrix::identity(2);
    default: return from_buffer(4, entangler_entries(kind).data());
  }
}

std::vector<ComplexMatrix> gate_gradient(GateKind kind, std::span<const double> params) {
  check_arity(kind, params);
  if (kind != GateKind::kU3) return {};
  Complex dt[4], dp[4], dl[4];
  u3_gradient_entries(params[0], params[1], params[2], dt, dp, dl);
  return {from_buffer(2, dt), from_buffer(2, dp), from_buffer(2, dl)};
}

EntanglerSet::EntanglerSet(std::vector<GateKind> kinds) : kinds_(std::move(kinds)) {
  if (kinds_.empty()) throw ConfigError("entangler set is empty");
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (!is_two_qubit(kinds_[i])) {
      throw ConfigError(std::string(gate_name(kinds_[i])) + " is not a two-qubit gate");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (kinds_[j] == kinds_[i]) {
        throw ConfigError("duplicate entangler " + std::string(gate_name(kinds_[i])));
      }
    }
  }
}

EntanglerSet EntanglerSet::parse(std::string_view text) {
  std::vector<GateKind> kinds;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token.empty()) throw ConfigError("empty entry in gate set '" + std::string(text) + "'");
    try {
      kinds.push_back(gate_kind_from_name(token));
    } catch (const LookupError& e) {
      throw ConfigError(e.what());
    }
    start = end + 1;
  }
  return EntanglerSet(std::move(kinds));
}

std::string EntanglerSet::to_string() const {
  std::string out;
  for (GateKind k : kinds_) {
    if (!out.empty()) out += ',';
    out += gate_name(k);
  }
  return out;
}

}  // namespace qsyn
