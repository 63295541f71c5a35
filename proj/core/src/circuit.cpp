#include "qsyn/circuit.hpp"

#include <algorithm>

#include "json.hpp"
#include "qsyn/error.hpp"
#include "qsyn/evaluator.hpp"

namespace qsyn {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (v >> (8 * byte)) & 0xffu;
    h *= kFnvPrime;
  }
}

bool is_single_slot_kind(GateKind k) { return k == GateKind::kU3 || k == GateKind::kIdentity1; }

}  // namespace

CircuitStructure::CircuitStructure(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw SizeError("circuit structure: qubit count " + std::to_string(num_qubits) +
                    " outside 1.." + std::to_string(kMaxQubits));
  }
  initial_.assign(static_cast<std::size_t>(num_qubits), GateKind::kU3);
}

int CircuitStructure::u3_count() const {
  int count = static_cast<int>(std::count(initial_.begin(), initial_.end(), GateKind::kU3));
  for (const ExpansionLayer& l : layers_) {
    count += (l.first_u3 == GateKind::kU3) + (l.second_u3 == GateKind::kU3);
  }
  return count;
}

int CircuitStructure::param_count() const { return 3 * u3_count(); }

std::vector<U3Slot> CircuitStructure::slots() const {
  std::vector<U3Slot> out;
  out.reserve(static_cast<std::size_t>(slot_count()));
  for (int q = 0; q < num_qubits_; ++q) {
    out.push_back(U3Slot{q, 0, q, initial_[q] == GateKind::kU3});
  }
  int stage = 1;
  for (const ExpansionLayer& l : layers_) {
    const int idx = static_cast<int>(out.size());
    out.push_back(U3Slot{idx, stage, l.link.first, l.first_u3 == GateKind::kU3});
    out.push_back(U3Slot{idx + 1, stage, l.link.second, l.second_u3 == GateKind::kU3});
    ++stage;
  }
  return out;
}

int CircuitStructure::param_offset(int slot) const {
  if (slot < 0 || slot >= slot_count()) throw SizeError("slot index out of range");
  int offset = 0;
  for (const U3Slot& s : slots()) {
    if (s.index == slot) return s.active ? offset : -1;
    if (s.active) offset += 3;
  }
  return -1;
}

CircuitStructure CircuitStructure::with_layer(const ExpansionLayer& layer) const {
  const Link& l = layer.link;
  if (l.first < 0 || l.second >= num_qubits_ || l.first >= l.second) {
    throw ValidationError("expansion layer link (" + std::to_string(l.first) + "," +
                          std::to_string(l.second) + ") invalid for " +
                          std::to_string(num_qubits_) + " qubits");
  }
  if (!is_two_qubit(layer.entangler)) {
    throw ValidationError("expansion layer entangler must be a two-qubit gate");
  }
  if (!is_single_slot_kind(layer.first_u3) || !is_single_slot_kind(layer.second_u3)) {
    throw ValidationError("expansion layer single-qubit slots must be u3 or id");
  }
  CircuitStructure out = *this;
  out.layers_.push_back(layer);
  return out;
}

CircuitStructure CircuitStructure::with_slot(int slot, GateKind kind) const {
  if (!is_single_slot_kind(kind)) throw ValidationError("slot kind must be u3 or id");
  if (slot < 0 || slot >= slot_count()) throw SizeError("slot index out of range");
  CircuitStructure out = *this;
  if (slot < num_qubits_) {
    out.initial_[slot] = kind;
  } else {
    ExpansionLayer& l = out.layers_[(slot - num_qubits_) / 2];
    ((slot - num_qubits_) % 2 == 0 ? l.first_u3 : l.second_u3) = kind;
  }
  return out;
}

CircuitStructure CircuitStructure::slab(int begin, int end) const {
  if (begin < 0 || end > cnot_count() || begin > end) throw SizeError("slab range out of bounds");
  CircuitStructure out(num_qubits_);
  std::fill(out.initial_.begin(), out.initial_.end(), GateKind::kIdentity1);
  out.layers_.assign(layers_.begin() + begin, layers_.begin() + end);
  return out;
}

std::uint64_t CircuitStructure::hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, static_cast<std::uint64_t>(num_qubits_));
  for (GateKind k : initial_) fnv_mix(h, static_cast<std::uint64_t>(k));
  for (const ExpansionLayer& l : layers_) {
    fnv_mix(h, static_cast<std::uint64_t>(l.link.first));
    fnv_mix(h, static_cast<std::uint64_t>(l.link.second));
    fnv_mix(h, static_cast<std::uint64_t>(l.entangler));
    fnv_mix(h, static_cast<std::uint64_t>(l.first_u3));
    fnv_mix(h, static_cast<std::uint64_t>(l.second_u3));
  }
  return h;
}

std::vector<CircuitStructure> successors(const CircuitStructure& s, const CouplingGraph& graph,
                                         const EntanglerSet& entanglers) {
  if (graph.num_qubits() != s.num_qubits()) {
    throw SizeError("successors: graph has " + std::to_string(graph.num_qubits()) +
                    " qubits, structure has " + std::to_string(s.num_qubits()));
  }
  if (graph.edges().empty()) throw ConfigError("successors: coupling graph has no edges");
  std::vector<CircuitStructure> out;
  out.reserve(graph.edges().size() * entanglers.size());
  for (const Link& e : graph.edges()) {
    for (GateKind k : entanglers.kinds()) out.push_back(s.with_layer(ExpansionLayer{e, k}));
  }
  return out;
}

std::vector<double> slab_params(const CircuitStructure& s, std::span<const double> params,
                                int begin, int end) {
  if (static_cast<int>(params.size()) != s.param_count()) {
    throw ArityError("slab_params: parameter count mismatch");
  }
  if (begin < 0 || end > s.cnot_count() || begin > end) {
    throw SizeError("slab range out of bounds");
  }
  std::vector<double> out;
  int offset = 0;
  for (const U3Slot& slot : s.slots()) {
    if (!slot.active) continue;
    if (slot.stage >= begin + 1 && slot.stage <= end) {
      out.insert(out.end(), params.begin() + offset, params.begin() + offset + 3);
    }
    offset += 3;
  }
  return out;
}

UnitaryMatrix instantiate(const CircuitStructure& s, std::span<const double> params) {
  if (static_cast<int>(params.size()) != s.param_count()) {
    throw ArityError("instantiate: expected " + std::to_string(s.param_count()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  CircuitEvaluator eval(s, UnitaryMatrix::identity(s.num_qubits()));
  std::vector<Complex> buf(eval.dim() * eval.dim());
  eval.unitary(params, buf);
  return UnitaryMatrix(ComplexMatrix(eval.dim(), std::move(buf)));
}

ObjectiveValue objective_and_gradient(const CircuitStructure& s, std::span<const double> params,
                                      const UnitaryMatrix& target) {
  CircuitEvaluator eval(s, target);
  ObjectiveValue out;
  out.gradient.resize(eval.param_count());
  out.value = eval.value_and_gradient(params, out.gradient);
  return out;
}

PlacedCircuit PlacedCircuit::place(CircuitStructure structure, std::vector<double> params,
                                   const UnitaryMatrix& target) {
  const double d = distance(target, instantiate(structure, params));
  return PlacedCircuit{std::move(structure), std::move(params), d};
}

int critical_path_depth(const CircuitStructure& s) {
  std::vector<int> t(static_cast<std::size_t>(s.num_qubits()), 0);
  for (int q = 0; q < s.num_qubits(); ++q) t[q] += s.initial_layer()[q] == GateKind::kU3;
  for (const ExpansionLayer& l : s.layers()) {
    const int start = std::max(t[l.link.first], t[l.link.second]) + 1;
    t[l.link.first] = start + (l.first_u3 == GateKind::kU3);
    t[l.link.second] = start + (l.second_u3 == GateKind::kU3);
  }
  return t.empty() ? 0 : *std::max_element(t.begin(), t.end());
}

int gate_count(const CircuitStructure& s) { return s.u3_count() + s.cnot_count(); }

double parallelism(const CircuitStructure& s) {
  const int depth = critical_path_depth(s);
  return depth == 0 ? 0.0 : static_cast<double>(gate_count(s)) / depth;
}

std::string to_json(const PlacedCircuit& c) {
  using nlohmann::json;
  const CircuitStructure& s = c.structure;
  json initial = json::array();
  for (GateKind k : s.initial_layer()) initial.push_back(gate_name(k));
  json layers = json::array();
  for (const ExpansionLayer& l : s.layers()) {
    layers.push_back({{"link", {l.link.first, l.link.second}},
                      {"entangler", gate_name(l.entangler)},
                      {"u3", {gate_name(l.first_u3), gate_name(l.second_u3)}}});
  }
  json doc{{"num_qubits", s.num_qubits()},
           {"initial_layer", initial},
           {"layers", layers},
           {"params", c.params},
           {"achieved_distance", c.achieved_distance}};
  return doc.dump();
}

PlacedCircuit placed_circuit_from_json(std::string_view text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    CircuitStructure s(doc.at("num_qubits").get<int>());
    const auto& initial = doc.at("initial_layer");
    if (static_cast<int>(initial.size()) != s.num_qubits()) {
      throw ParseError("circuit JSON: initial_layer length mismatch");
    }
    for (int q = 0; q < s.num_qubits(); ++q) {
      s = s.with_slot(q, gate_kind_from_name(initial[q].get<std::string>()));
    }
    for (const auto& l : doc.at("layers")) {
      ExpansionLayer layer{Link{l.at("link")[0].get<int>(), l.at("link")[1].get<int>()},
                           gate_kind_from_name(l.at("entangler").get<std::string>()),
                           gate_kind_from_name(l.at("u3")[0].get<std::string>()),
                           gate_kind_from_name(l.at("u3")[1].get<std::string>())};
      s = s.with_layer(layer);
    }
    auto params = doc.at("params").get<std::vector<double>>();
    if (static_cast<int>(params.size()) != s.param_count()) {
      throw ParseError("circuit JSON: parameter count mismatch");
    }
    return PlacedCircuit{std::move(s), std::move(params),
                         doc.value("achieved_distance", 1.0)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what());
  } catch (const LookupError& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what());
  }
}

}  // namespace qsyn
