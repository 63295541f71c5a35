#include <array>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

#include "qsyn/circuit.hpp"
#include "qsyn/error.hpp"

namespace qsyn {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string_view qasm_gate_name(GateKind kind) {
  return kind == GateKind::kCnot ? std::string_view("cx") : gate_name(kind);
}

std::string matrix_comment(GateKind kind) {
  std::ostringstream out;
  out << "// " << gate_name(kind) << " matrix (row-major, first qubit most significant): [";
  const auto entries = entangler_entries(kind);
  for (int r = 0; r < 4; ++r) {
    out << (r ? ", [" : "[");
    for (int c = 0; c < 4; ++c) {
      const Complex z = entries[4 * r + c];
      out << (c ? ", " : "") << format_double(z.real()) << (z.imag() < 0 ? "-" : "+")
          << format_double(std::abs(z.imag())) << "i";
    }
    out << "]";
  }
  out << "]";
  return out.str();
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

int parse_qubit(std::string_view operand, int num_qubits) {
  const std::string t = trim(operand);
  if (t.size() < 4 || t.rfind("q[", 0) != 0 || t.back() != ']') {
    throw ParseError("qasm: bad qubit operand '" + t + "'");
  }
  char* end = nullptr;
  const std::string idx = t.substr(2, t.size() - 3);
  const long q = std::strtol(idx.c_str(), &end, 10);
  if (end == idx.c_str() || *end != '\0' || q < 0 || q >= num_qubits) {
    throw ParseError("qasm: qubit index out of range in '" + t + "'");
  }
  return static_cast<int>(q);
}

double parse_number(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw ParseError("qasm: bad number '" + text + "'");
  return v;
}

}  // namespace

std::string to_qasm(const PlacedCircuit& c) {
  const CircuitStructure& s = c.structure;
  if (static_cast<int>(c.params.size()) != s.param_count()) {
    throw ArityError("to_qasm: parameter count mismatch");
  }
  std::ostringstream out;
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  std::set<GateKind> custom;
  for (const ExpansionLayer& l : s.layers()) {
    if (l.entangler != GateKind::kCnot) custom.insert(l.entangler);
  }
  for (GateKind k : custom) {
    out << matrix_comment(k) << "\nopaque " << gate_name(k) << " a,b;\n";
  }
  out << "qreg q[" << s.num_qubits() << "];\n";

  std::size_t offset = 0;
  auto emit_u3 = [&](GateKind kind, int qubit) {
    if (kind != GateKind::kU3) return;
    out << "u3(" << format_double(c.params[offset]) << "," << format_double(c.params[offset + 1])
        << "," << format_double(c.params[offset + 2]) << ") q[" << qubit << "];\n";
    offset += 3;
  };
  for (int q = 0; q < s.num_qubits(); ++q) emit_u3(s.initial_layer()[q], q);
  for (const ExpansionLayer& l : s.layers()) {
    out << qasm_gate_name(l.entangler) << " q[" << l.link.first << "],q[" << l.link.second
        << "];\n";
    emit_u3(l.first_u3, l.link.first);
    emit_u3(l.second_u3, l.link.second);
  }
  return out.str();
}

PlacedCircuit parse_qasm(std::string_view text) {
  // Strip comments, then split into ';'-terminated statements.
  std::string cleaned;
  {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
      const auto pos = line.find("//");
      cleaned += line.substr(0, pos);
      cleaned += '\n';
    }
  }

  int num_qubits = 0;
  std::optional<CircuitStructure> structure;
  // Parameters per slot, later packed in slot order.
  std::vector<std::optional<std::array<double, 3>>> initial_params;
  struct PendingLayer {
    ExpansionLayer layer;
    std::optional<std::array<double, 3>> first, second;
  };
  std::vector<PendingLayer> layers;

  std::size_t start = 0;
  while (true) {
    const std::size_t semi = cleaned.find(';', start);
    if (semi == std::string::npos) {
      if (!trim(std::string_view(cleaned).substr(start)).empty()) {
        throw ParseError("qasm: trailing text without ';'");
      }
      break;
    }
    const std::string stmt = trim(std::string_view(cleaned).substr(start, semi - start));
    start = semi + 1;
    if (stmt.empty()) continue;
    if (stmt.rfind("OPENQASM", 0) == 0 || stmt.rfind("include", 0) == 0 ||
        stmt.rfind("opaque", 0) == 0) {
      continue;
    }
    if (stmt.rfind("qreg", 0) == 0) {
      const auto lb = stmt.find('[');
      const auto rb = stmt.find(']');
      if (lb == std::string::npos || rb == std::string::npos || num_qubits != 0) {
        throw ParseError("qasm: bad qreg declaration");
      }
      num_qubits = static_cast<int>(parse_number(stmt.substr(lb + 1, rb - lb - 1)));
      structure.emplace(num_qubits);
      initial_params.assign(static_cast<std::size_t>(num_qubits), std::nullopt);
      continue;
    }
    if (!structure) throw ParseError("qasm: gate before qreg declaration");

    if (stmt.rfind("u3(", 0) == 0) {
      const auto close = stmt.find(')');
      if (close == std::string::npos) throw ParseError("qasm: unterminated u3 arguments");
      std::array<double, 3> p{};
      std::istringstream args(stmt.substr(3, close - 3));
      std::string tok;
      for (int k = 0; k < 3; ++k) {
        if (!std::getline(args, tok, ',')) throw ParseError("qasm: u3 needs three arguments");
        p[k] = parse_number(trim(tok));
      }
      if (std::getline(args, tok, ',')) throw ParseError("qasm: u3 needs three arguments");
      const int q = parse_qubit(std::string_view(stmt).substr(close + 1), num_qubits);
      std::optional<std::array<double, 3>>* slot = nullptr;
      if (layers.empty()) {
        slot = &initial_params[q];
      } else {
        PendingLayer& l = layers.back();
        if (q == l.layer.link.first) slot = &l.first;
        if (q == l.layer.link.second) slot = &l.second;
        if (!slot) throw ParseError("qasm: u3 on qubit outside the preceding entangler");
      }
      if (slot->has_value()) throw ParseError("qasm: repeated u3 in one slot");
      *slot = p;
      continue;
    }

    const auto space = stmt.find_first_of(" \t");
    if (space == std::string::npos) throw ParseError("qasm: cannot parse '" + stmt + "'");
    const std::string name = stmt.substr(0, space);
    GateKind kind;
    try {
      kind = gate_kind_from_name(name);
    } catch (const LookupError&) {
      throw ParseError("qasm: unknown gate '" + name + "'");
    }
    if (!is_two_qubit(kind)) throw ParseError("qasm: unexpected gate '" + name + "'");
    const std::string operands = stmt.substr(space + 1);
    const auto comma = operands.find(',');
    if (comma == std::string::npos) throw ParseError("qasm: two-qubit gate needs two operands");
    const int a = parse_qubit(std::string_view(operands).substr(0, comma), num_qubits);
    const int b = parse_qubit(std::string_view(operands).substr(comma + 1), num_qubits);
    if (a >= b) throw ParseError("qasm: entangler operands must be in increasing order");
    layers.push_back(PendingLayer{ExpansionLayer{Link{a, b}, kind}, std::nullopt, std::nullopt});
  }
  if (!structure) throw ParseError("qasm: missing qreg declaration");

  CircuitStructure s = *structure;
  std::vector<double> params;
  auto take = [&](const std::optional<std::array<double, 3>>& p) {
    if (p) params.insert(params.end(), p->begin(), p->end());
    return p ? GateKind::kU3 : GateKind::kIdentity1;
  };
  for (int q = 0; q < num_qubits; ++q) s = s.with_slot(q, take(initial_params[q]));
  for (PendingLayer& l : layers) {
    l.layer.first_u3 = take(l.first);
    l.layer.second_u3 = take(l.second);
    s = s.with_layer(l.layer);
  }
  return PlacedCircuit{std::move(s), std::move(params), 1.0};
}

}  // namespace qsyn
