#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qroute/rng.hpp"

namespace qroute {

using Edge = std::pair<int, int>;  // node pair, stored with first < second

/// Undirected connectivity graph over physical nodes, with precomputed
/// all-pairs hop distances. Immutable after construction; edges are sorted
/// lexicographically and the position of an edge in edges() is its id.
class Architecture {
 public:
  /// m x n lattice with 4-neighbour connectivity. Nodes are row-major.
  static Architecture grid(int rows, int cols);

  /// One of the bundled device topologies: "tokyo", "rueschlikon", "acorn".
  /// Edge lists are loaded from the data directory (see data_dir()).
  static Architecture named(const std::string& name);

  /// Edge-list file: header "nodes N", one "i j" pair per line, '#' comments.
  static Architecture from_edge_list_file(const std::string& path);

  static Architecture from_edges(std::string id, int n_nodes,
                                 std::vector<Edge> edges);

  /// Parses an architecture spec string: "grid:MxN", a bundled name, or
  /// "edgelist:PATH".
  static Architecture from_spec(const std::string& spec);

  int n_nodes() const { return n_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int node) const { return adj_[node]; }
  bool has_edge(int a, int b) const;
  int degree(int node) const { return static_cast<int>(adj_[node].size()); }

  int dist(int a, int b) const { return dist_[a * n_nodes_ + b]; }
  int diameter() const { return diameter_; }
  int max_degree() const { return max_degree_; }

  const std::string& id() const { return id_; }

  /// Directory searched for bundled topology files. Honours the
  /// QROUTE_DATA_DIR environment variable, falling back to the build-time
  /// default.
  static std::string data_dir();

 private:
  Architecture() = default;

  std::string id_;
  int n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> dist_;  // n x n, row-major
  int diameter_ = 0;
  int max_degree_ = 0;
};

/// BFS hop distances from every node; throws if the graph is disconnected,
/// naming an unreachable pair. OpenMP-parallel over source nodes.
std::vector<int> all_pairs_distances(int n_nodes,
                                     const std::vector<Edge>& edges);

/// Single-threaded reference used by tests and the parallel benchmark.
std::vector<int> all_pairs_distances_serial(int n_nodes,
                                            const std::vector<Edge>& edges);

/// Total bijection between the architecture's nodes and logical qubits.
/// When a circuit has fewer qubits than nodes, the remaining nodes hold idle
/// padding qubits (ids >= n_qubits) that never acquire targets.
struct Placement {
  std::vector<int> node_to_qubit;
  std::vector<int> qubit_to_node;

  int n_nodes() const { return static_cast<int>(node_to_qubit.size()); }
  int qubit_at(int node) const { return node_to_qubit[node]; }
  int node_of(int qubit) const { return qubit_to_node[qubit]; }

  /// Exchanges the qubits on two nodes.
  void apply_swap(int n0, int n1);

  bool is_bijection() const;

  static Placement identity(int n_nodes);
};

/// Uniformly random placement of `n_qubits` circuit qubits (plus idle
/// padding) onto the architecture. Throws if n_qubits > n_nodes.
Placement random_placement(const Architecture& arch, int n_qubits, Rng& rng);

/// Placement file: header "nodes N", one "node qubit" pair per line,
/// '#' comments.
Placement load_placement(const std::string& path);
void save_placement(const Placement& p, const std::string& path);

}  // namespace qroute
