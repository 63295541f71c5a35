#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsyn {

// Unordered qubit pair, stored with first < second.
struct Link {
  int first = 0;
  int second = 0;

  friend bool operator==(const Link&, const Link&) = default;
  friend auto operator<=>(const Link&, const Link&) = default;
};

// Undirected coupling graph. Edges are deduplicated, normalized and sorted;
// the graph is connected and free of self-loops by construction.
class CouplingGraph {
 public:
  // Throws ValidationError on out-of-range indices, self-loops or a
  // disconnected graph.
  CouplingGraph(int num_qubits, const std::vector<std::pair<int, int>>& edges);

  static CouplingGraph linear(int num_qubits);
  static CouplingGraph all_to_all(int num_qubits);

  // { "num_qubits": n, "edges": [[a, b], ...] }
  static CouplingGraph from_json(std::string_view text);
  static CouplingGraph from_file(const std::filesystem::path& path);

  // "linear", "all" (or "all_to_all"), otherwise a path to a JSON file.
  static CouplingGraph resolve(std::string_view spec, int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const std::vector<Link>& edges() const { return edges_; }
  bool has_edge(int a, int b) const;
  std::string to_json() const;

  friend bool operator==(const CouplingGraph&, const CouplingGraph&) = default;

 private:
  int num_qubits_ = 0;
  std::vector<Link> edges_;
};

// Union-find connectivity test over `num_qubits` vertices.
bool is_connected(int num_qubits, const std::vector<Link>& edges);

}  // namespace qsyn
