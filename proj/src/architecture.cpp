#include "qroute/architecture.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qroute {

namespace {

std::vector<Edge> normalize_edges(int n_nodes, std::vector<Edge> edges) {
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes) {
      throw std::invalid_argument("edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") out of range for " +
                                  std::to_string(n_nodes) + " nodes");
    }
    if (a == b) {
      throw std::invalid_argument("self-loop on node " + std::to_string(a));
    }
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<int> bfs_from(int source, int n_nodes,
                          const std::vector<std::vector<int>>& adj) {
  std::vector<int> dist(n_nodes, -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> adjacency(int n_nodes,
                                        const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

void check_connected(int n_nodes, const std::vector<int>& dist) {
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j) {
      if (dist[i * n_nodes + j] < 0) {
        throw std::invalid_argument("graph disconnected: no path from node " +
                                    std::to_string(i) + " to node " +
                                    std::to_string(j));
      }
    }
  }
}

std::string strip_comment(std::string line) {
  if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                           line.back() == '\t')) {
    line.pop_back();
  }
  return line;
}

}  // namespace

std::vector<int> all_pairs_distances_serial(int n_nodes,
                                            const std::vector<Edge>& edges) {
  const auto adj = adjacency(n_nodes, edges);
  std::vector<int> dist(static_cast<std::size_t>(n_nodes) * n_nodes, -1);
  for (int s = 0; s < n_nodes; ++s) {
    const auto row = bfs_from(s, n_nodes, adj);
    std::copy(row.begin(), row.end(), dist.begin() + s * n_nodes);
  }
  check_connected(n_nodes, dist);
  return dist;
}

std::vector<int> all_pairs_distances(int n_nodes,
                                     const std::vector<Edge>& edges) {
  const auto adj = adjacency(n_nodes, edges);
  std::vector<int> dist(static_cast<std::size_t>(n_nodes) * n_nodes, -1);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n_nodes; ++s) {
    const auto row = bfs_from(s, n_nodes, adj);
    std::copy(row.begin(), row.end(), dist.begin() + s * n_nodes);
  }
  check_connected(n_nodes, dist);
  return dist;
}

Architecture Architecture::from_edges(std::string id, int n_nodes,
                                      std::vector<Edge> edges) {
  if (n_nodes < 1) throw std::invalid_argument("architecture needs nodes");
  Architecture arch;
  arch.id_ = std::move(id);
  arch.n_nodes_ = n_nodes;
  arch.edges_ = normalize_edges(n_nodes, std::move(edges));
  arch.adj_ = adjacency(n_nodes, arch.edges_);
  arch.dist_ = all_pairs_distances(n_nodes, arch.edges_);
  arch.diameter_ =
      *std::max_element(arch.dist_.begin(), arch.dist_.end());
  arch.max_degree_ = 0;
  for (const auto& nb : arch.adj_) {
    arch.max_degree_ = std::max(arch.max_degree_, static_cast<int>(nb.size()));
  }
  return arch;
}

Architecture Architecture::grid(int rows, int cols) {
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw std::invalid_argument("grid needs m,n >= 1 and m*n >= 2");
  }
  std::vector<Edge> edges;
  auto node = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(node(r, c), node(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(node(r, c), node(r + 1, c));
    }
  }
  return from_edges("grid:" + std::to_string(rows) + "x" + std::to_string(cols),
                    rows * cols, std::move(edges));
}

std::string Architecture::data_dir() {
  if (const char* env = std::getenv("QROUTE_DATA_DIR")) return env;
#ifdef QROUTE_DEFAULT_DATA_DIR
  return QROUTE_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

Architecture Architecture::named(const std::string& name) {
  if (name != "tokyo" && name != "rueschlikon" && name != "acorn") {
    throw std::invalid_argument("unknown architecture name: " + name);
  }
  const auto path =
      (std::filesystem::path(data_dir()) / (name + ".edges")).string();
  Architecture arch = from_edge_list_file(path);
  arch.id_ = name;
  return arch;
}

Architecture Architecture::from_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open edge list: " + path);
  std::string line;
  int line_no = 0;
  int n_nodes = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "nodes") {
      if (!(ss >> n_nodes) || n_nodes < 1) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": bad nodes header");
      }
      continue;
    }
    int a = 0, b = 0;
    std::istringstream pair_ss(line);
    if (!(pair_ss >> a >> b)) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected 'i j' edge");
    }
    edges.emplace_back(a, b);
  }
  if (n_nodes < 0) {
    throw std::invalid_argument(path + ": missing 'nodes N' header");
  }
  return from_edges("edgelist:" + path, n_nodes, std::move(edges));
}

Architecture Architecture::from_spec(const std::string& spec) {
  if (spec.rfind("grid:", 0) == 0) {
    const auto body = spec.substr(5);
    const auto x = body.find('x');
    if (x == std::string::npos) {
      throw std::invalid_argument("grid spec must be grid:MxN, got " + spec);
    }
    int m = 0, n = 0;
    try {
      m = std::stoi(body.substr(0, x));
      n = std::stoi(body.substr(x + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("grid spec must be grid:MxN, got " + spec);
    }
    return grid(m, n);
  }
  if (spec.rfind("edgelist:", 0) == 0) {
    return from_edge_list_file(spec.substr(9));
  }
  return named(spec);
}

bool Architecture::has_edge(int a, int b) const {
  if (a == b) return false;
  return dist(a, b) == 1;
}

void Placement::apply_swap(int n0, int n1) {
  std::swap(node_to_qubit[n0], node_to_qubit[n1]);
  qubit_to_node[node_to_qubit[n0]] = n0;
  qubit_to_node[node_to_qubit[n1]] = n1;
}

bool Placement::is_bijection() const {
  const int n = n_nodes();
  if (static_cast<int>(qubit_to_node.size()) != n) return false;
  for (int node = 0; node < n; ++node) {
    const int q = node_to_qubit[node];
    if (q < 0 || q >= n || qubit_to_node[q] != node) return false;
  }
  return true;
}

Placement Placement::identity(int n_nodes) {
  Placement p;
  p.node_to_qubit.resize(n_nodes);
  p.qubit_to_node.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    p.node_to_qubit[i] = i;
    p.qubit_to_node[i] = i;
  }
  return p;
}

Placement random_placement(const Architecture& arch, int n_qubits, Rng& rng) {
  if (n_qubits > arch.n_nodes()) {
    throw std::invalid_argument(
        "circuit has " + std::to_string(n_qubits) + " qubits but only " +
        std::to_string(arch.n_nodes()) + " nodes are available");
  }
  Placement p = Placement::identity(arch.n_nodes());
  rng.shuffle(p.node_to_qubit);
  for (int node = 0; node < arch.n_nodes(); ++node) {
    p.qubit_to_node[p.node_to_qubit[node]] = node;
  }
  return p;
}

Placement load_placement(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open placement: " + path);
  std::string line;
  int line_no = 0;
  int n = -1;
  Placement p;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "nodes") {
      if (!(ss >> n) || n < 1) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": bad nodes header");
      }
      p.node_to_qubit.assign(n, -1);
      p.qubit_to_node.assign(n, -1);
      continue;
    }
    int node = 0, qubit = 0;
    std::istringstream pair_ss(line);
    if (!(pair_ss >> node >> qubit) || n < 0 || node < 0 || node >= n ||
        qubit < 0 || qubit >= n) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected 'node qubit' within range");
    }
    p.node_to_qubit[node] = qubit;
    p.qubit_to_node[qubit] = node;
  }
  if (n < 0 || !p.is_bijection()) {
    throw std::invalid_argument(path + ": placement is not a bijection");
  }
  return p;
}

void save_placement(const Placement& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write placement: " + path);
  out << "nodes " << p.n_nodes() << "\n";
  for (int node = 0; node < p.n_nodes(); ++node) {
    out << node << " " << p.node_to_qubit[node] << "\n";
  }
}

}  // namespace qroute
