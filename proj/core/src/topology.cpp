#include "qsyn/topology.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "qsyn/error.hpp"
#include "qsyn/matrix.hpp"

namespace qsyn {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

bool is_connected(int num_qubits, const std::vector<Link>& edges) {
  if (num_qubits <= 1) return true;
  DisjointSets sets(num_qubits);
  int components = num_qubits;
  for (const Link& e : edges) {
    if (sets.unite(e.first, e.second)) --components;
  }
  return components == 1;
}

CouplingGraph::CouplingGraph(int num_qubits, const std::vector<std::pair<int, int>>& edges)
    : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ValidationError("coupling graph: qubit count " + std::to_string(num_qubits) +
                          " out of range");
  }
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= num_qubits || b >= num_qubits) {
      throw ValidationError("coupling graph: edge (" + std::to_string(a) + "," +
                            std::to_string(b) + ") references a qubit out of range");
    }
    if (a == b) throw ValidationError("coupling graph: self-loop on qubit " + std::to_string(a));
    edges_.push_back(Link{std::min(a, b), std::max(a, b)});
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  if (!is_connected(num_qubits_, edges_)) {
    throw ValidationError("coupling graph is disconnected");
  }
}

CouplingGraph CouplingGraph::linear(int num_qubits) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < num_qubits; ++i) edges.emplace_back(i, i + 1);
  return CouplingGraph(num_qubits, edges);
}

CouplingGraph CouplingGraph::all_to_all(int num_qubits) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < num_qubits; ++i) {
    for (int j = i + 1; j < num_qubits; ++j) edges.emplace_back(i, j);
  }
  return CouplingGraph(num_qubits, edges);
}

CouplingGraph CouplingGraph::from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    const int n = doc.at("num_qubits").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError("coupling graph: edge must be [a, b]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return CouplingGraph(n, edges);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("coupling graph JSON: ") + e.what());
  }
}

CouplingGraph CouplingGraph::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topology file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

CouplingGraph CouplingGraph::resolve(std::string_view spec, int num_qubits) {
  if (spec == "linear") return linear(num_qubits);
  if (spec == "all" || spec == "all_to_all") return all_to_all(num_qubits);
  CouplingGraph g = from_file(std::filesystem::path(spec));
  if (g.num_qubits() != num_qubits) {
    throw ValidationError("topology file has " + std::to_string(g.num_qubits()) +
                          " qubits, target has " + std::to_string(num_qubits));
  }
  return g;
}

bool CouplingGraph::has_edge(int a, int b) const {
  const Link l{std::min(a, b), std::max(a, b)};
  return std::binary_search(edges_.begin(), edges_.end(), l);
}

std::string CouplingGraph::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const Link& e : edges_) edges.push_back({e.first, e.second});
  return nlohmann::json{{"num_qubits", num_qubits_}, {"edges", edges}}.dump();
}

}  // namespace qsyn
