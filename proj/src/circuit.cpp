#include "qroute/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qroute {

LogicalCircuit::LogicalCircuit(int n_qubits,
                               const std::vector<std::pair<int, int>>& pairs)
    : n_qubits_(n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("negative qubit count");
  gates_.reserve(pairs.size());
  int index = 1;
  for (const auto& [q0, q1] : pairs) {
    if (q0 < 0 || q1 < 0 || q0 >= n_qubits || q1 >= n_qubits) {
      throw std::invalid_argument("gate " + std::to_string(index) +
                                  " references qubit outside [0," +
                                  std::to_string(n_qubits) + ")");
    }
    if (q0 == q1) {
      throw std::invalid_argument("gate " + std::to_string(index) +
                                  " acts twice on qubit " +
                                  std::to_string(q0));
    }
    gates_.push_back({index, q0, q1});
    ++index;
  }
}

int circuit_depth(const LogicalCircuit& circuit) {
  std::vector<int> per_qubit(circuit.n_qubits(), 0);
  int depth = 0;
  for (const auto& g : circuit.gates()) {
    const int layer = std::max(per_qubit[g.q0], per_qubit[g.q1]) + 1;
    per_qubit[g.q0] = layer;
    per_qubit[g.q1] = layer;
    depth = std::max(depth, layer);
  }
  return depth;
}

std::vector<std::vector<LogicalGate>> decompose_layers(
    const LogicalCircuit& circuit) {
  std::vector<int> per_qubit(circuit.n_qubits(), 0);
  std::vector<std::vector<LogicalGate>> layers;
  for (const auto& g : circuit.gates()) {
    const int layer = std::max(per_qubit[g.q0], per_qubit[g.q1]) + 1;
    per_qubit[g.q0] = layer;
    per_qubit[g.q1] = layer;
    if (static_cast<int>(layers.size()) < layer) layers.resize(layer);
    layers[layer - 1].push_back(g);
  }
  return layers;
}

DepthMetrics cdo_cdr(int original_depth, int routed_depth) {
  if (original_depth <= 0) {
    throw std::invalid_argument(
        "depth ratio undefined for original depth " +
        std::to_string(original_depth));
  }
  if (routed_depth < original_depth) {
    throw std::invalid_argument("routed depth " +
                                std::to_string(routed_depth) +
                                " below original " +
                                std::to_string(original_depth));
  }
  DepthMetrics m;
  m.original_depth = original_depth;
  m.routed_depth = routed_depth;
  m.cdo = routed_depth - original_depth;
  const long long g = std::gcd(static_cast<long long>(routed_depth),
                               static_cast<long long>(original_depth));
  m.cdr_num = routed_depth / g;
  m.cdr_den = original_depth / g;
  return m;
}

int RoutedCircuit::swap_count() const {
  return static_cast<int>(
      std::count_if(ops.begin(), ops.end(),
                    [](const RoutedOp& op) { return op.kind == OpKind::Swap; }));
}

int routed_depth(const RoutedCircuit& routed) {
  int depth = 0;
  for (const auto& op : routed.ops) depth = std::max(depth, op.timestep);
  return depth;
}

RoutedCircuit relayer(const RoutedCircuit& routed) {
  RoutedCircuit out = routed;
  std::vector<int> last(routed.initial_placement.n_nodes(), 0);
  for (auto& op : out.ops) {
    const int t = std::max(last[op.n0], last[op.n1]) + 1;
    op.timestep = t;
    last[op.n0] = t;
    last[op.n1] = t;
  }
  std::stable_sort(out.ops.begin(), out.ops.end(),
                   [](const RoutedOp& a, const RoutedOp& b) {
                     return a.timestep < b.timestep;
                   });
  return out;
}

RoutedCircuit decompose_swaps(const RoutedCircuit& routed) {
  RoutedCircuit out;
  out.arch_id = routed.arch_id;
  out.initial_placement = routed.initial_placement;
  out.final_placement = routed.final_placement;
  out.ops.reserve(routed.ops.size());
  for (const auto& op : routed.ops) {
    if (op.kind == OpKind::Swap) {
      for (int k = 0; k < 3; ++k) {
        out.ops.push_back({OpKind::Cnot, op.n0, op.n1, op.timestep, 0});
      }
    } else {
      out.ops.push_back(op);
    }
  }
  return relayer(out);
}

namespace {

void add_violation(std::vector<Violation>& out, Violation::Check check,
                   int op_index, std::string message) {
  out.push_back({check, op_index, std::move(message)});
}

}  // namespace

std::vector<Violation> validate_routed(const LogicalCircuit& original,
                                       const RoutedCircuit& routed,
                                       const Architecture& arch) {
  std::vector<Violation> out;
  const int n_nodes = arch.n_nodes();

  if (routed.initial_placement.n_nodes() != n_nodes ||
      !routed.initial_placement.is_bijection()) {
    add_violation(out, Violation::Check::BadOp, -1,
                  "initial placement is not a bijection over the nodes");
    return out;
  }

  // Replay in (timestep, position) order; within a timestep all ops are
  // node-disjoint so this order is canonical.
  std::vector<int> order(routed.ops.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return routed.ops[a].timestep < routed.ops[b].timestep;
  });

  // Per-qubit pending interaction queues of the original circuit.
  std::vector<std::vector<int>> pending(original.n_qubits());
  for (const auto& g : original.gates()) {
    pending[g.q0].push_back(g.index);
    pending[g.q1].push_back(g.index);
  }
  std::vector<std::size_t> cursor(original.n_qubits(), 0);
  std::vector<char> executed(original.n_gates() + 1, 0);

  Placement placement = routed.initial_placement;
  std::map<Edge, int> swap_triple;  // untagged-CNOT counts per node pair
  int current_timestep = -1;
  std::vector<char> used(n_nodes, 0);

  for (int idx : order) {
    const auto& op = routed.ops[idx];
    if (op.n0 < 0 || op.n1 < 0 || op.n0 >= n_nodes || op.n1 >= n_nodes ||
        op.n0 == op.n1 || op.timestep < 1) {
      add_violation(out, Violation::Check::BadOp, idx, "malformed op");
      continue;
    }
    if (!arch.has_edge(op.n0, op.n1)) {
      add_violation(out, Violation::Check::NonEdge, idx,
                    "(" + std::to_string(op.n0) + "," +
                        std::to_string(op.n1) + ") is not an edge");
    }
    if (op.timestep != current_timestep) {
      current_timestep = op.timestep;
      std::fill(used.begin(), used.end(), 0);
    }
    if (used[op.n0] || used[op.n1]) {
      add_violation(out, Violation::Check::NodeReuse, idx,
                    "node used twice in timestep " +
                        std::to_string(op.timestep));
    }
    used[op.n0] = used[op.n1] = 1;

    if (op.kind == OpKind::Swap) {
      placement.apply_swap(op.n0, op.n1);
      continue;
    }
    if (op.source_gate == 0) {
      // Untagged CNOTs only arise from SWAP decomposition; each completed
      // triple on a node pair exchanges the pair's qubits.
      const Edge key{std::min(op.n0, op.n1), std::max(op.n0, op.n1)};
      if (++swap_triple[key] == 3) {
        placement.apply_swap(key.first, key.second);
        swap_triple.erase(key);
      }
      continue;
    }
    const int g = op.source_gate;
    if (g < 1 || g > original.n_gates()) {
      add_violation(out, Violation::Check::BadOp, idx,
                    "source gate " + std::to_string(g) + " out of range");
      continue;
    }
    const auto& gate = original.gates()[g - 1];
    const int qa = placement.qubit_at(op.n0);
    const int qb = placement.qubit_at(op.n1);
    if (!((qa == gate.q0 && qb == gate.q1) ||
          (qa == gate.q1 && qb == gate.q0))) {
      add_violation(out, Violation::Check::WrongNodes, idx,
                    "gate " + std::to_string(g) + " executed on nodes holding "
                    "qubits (" + std::to_string(qa) + "," +
                        std::to_string(qb) + ")");
      continue;
    }
    if (executed[g]) {
      add_violation(out, Violation::Check::MissingGate, idx,
                    "gate " + std::to_string(g) + " executed twice");
      continue;
    }
    const bool front0 = cursor[gate.q0] < pending[gate.q0].size() &&
                        pending[gate.q0][cursor[gate.q0]] == g;
    const bool front1 = cursor[gate.q1] < pending[gate.q1].size() &&
                        pending[gate.q1][cursor[gate.q1]] == g;
    if (!front0 || !front1) {
      add_violation(out, Violation::Check::OrderBroken, idx,
                    "gate " + std::to_string(g) +
                        " executed out of per-qubit order");
      continue;
    }
    ++cursor[gate.q0];
    ++cursor[gate.q1];
    executed[g] = 1;
  }

  for (const auto& g : original.gates()) {
    if (!executed[g.index]) {
      add_violation(out, Violation::Check::MissingGate, -1,
                    "gate " + std::to_string(g.index) + " never executed");
    }
  }
  for (const auto& [key, count] : swap_triple) {
    add_violation(out, Violation::Check::BadSwapTriple, -1,
                  std::to_string(count) + " stray untagged CNOT(s) on (" +
                      std::to_string(key.first) + "," +
                      std::to_string(key.second) + ")");
  }
  if (routed.final_placement.n_nodes() != n_nodes ||
      placement.node_to_qubit != routed.final_placement.node_to_qubit) {
    add_violation(out, Violation::Check::PlacementDrift, -1,
                  "replayed placement differs from recorded final placement");
  }
  return out;
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

}  // namespace

LogicalCircuit parse_gatelist(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int declared = -1;
  int max_qubit = -1;
  std::vector<std::pair<int, int>> pairs;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (declared < 0 && pairs.empty() && line.rfind("qubits", 0) == 0) {
      std::string kw;
      ss >> kw;
      if (!(ss >> declared) || declared < 0) {
        parse_fail(line_no, "bad qubits header");
      }
      std::string rest;
      if (ss >> rest) parse_fail(line_no, "trailing tokens after header");
      continue;
    }
    int q0 = 0, q1 = 0;
    std::string rest;
    if (!(ss >> q0 >> q1) || (ss >> rest)) {
      parse_fail(line_no, "expected two qubit indices");
    }
    if (q0 < 0 || q1 < 0) parse_fail(line_no, "negative qubit index");
    if (q0 == q1) parse_fail(line_no, "gate acts twice on one qubit");
    if (declared >= 0 && (q0 >= declared || q1 >= declared)) {
      parse_fail(line_no, "qubit index exceeds declared count " +
                              std::to_string(declared));
    }
    max_qubit = std::max({max_qubit, q0, q1});
    pairs.emplace_back(q0, q1);
  }
  const int n_qubits = declared >= 0 ? declared : max_qubit + 1;
  return LogicalCircuit(n_qubits, pairs);
}

namespace {

// Parses "name[index]" and returns (name, index).
std::pair<std::string, int> parse_qasm_ref(const std::string& token,
                                           int line_no) {
  const auto open = token.find('[');
  const auto close = token.find(']');
  if (open == std::string::npos || close == std::string::npos ||
      close < open + 2 || close != token.size() - 1) {
    parse_fail(line_no, "expected name[index], got '" + token + "'");
  }
  const std::string name = trim(token.substr(0, open));
  int index = -1;
  try {
    index = std::stoi(token.substr(open + 1, close - open - 1));
  } catch (const std::exception&) {
    parse_fail(line_no, "bad index in '" + token + "'");
  }
  if (name.empty() || index < 0) {
    parse_fail(line_no, "bad reference '" + token + "'");
  }
  return {name, index};
}

}  // namespace

LogicalCircuit parse_qasm(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::string reg_name;
  int reg_size = -1;
  std::vector<std::pair<int, int>> pairs;
  std::string carry;  // statement spanning lines
  int carry_line = 0;

  auto handle = [&](std::string stmt, int stmt_line) {
    stmt = trim(stmt);
    if (stmt.empty()) return;
    std::istringstream ss(stmt);
    std::string head;
    ss >> head;
    if (head == "qreg") {
      std::string rest;
      std::getline(ss, rest);
      auto [name, size] = parse_qasm_ref(trim(rest), stmt_line);
      if (size < 1) parse_fail(stmt_line, "register must hold qubits");
      if (reg_size >= 0) parse_fail(stmt_line, "only one register supported");
      reg_name = name;
      reg_size = size;
      return;
    }
    if (head == "cx" || head == "CX") {
      std::string rest;
      std::getline(ss, rest);
      rest = trim(rest);
      const auto comma = rest.find(',');
      if (comma == std::string::npos) {
        parse_fail(stmt_line, "cx needs two operands");
      }
      auto [name0, i0] = parse_qasm_ref(trim(rest.substr(0, comma)), stmt_line);
      auto [name1, i1] = parse_qasm_ref(trim(rest.substr(comma + 1)), stmt_line);
      if (reg_size < 0) parse_fail(stmt_line, "cx before qreg");
      if (name0 != reg_name || name1 != reg_name) {
        parse_fail(stmt_line, "unknown register in cx");
      }
      if (i0 >= reg_size || i1 >= reg_size) {
        parse_fail(stmt_line, "qubit index exceeds register size " +
                                  std::to_string(reg_size));
      }
      if (i0 == i1) parse_fail(stmt_line, "cx acts twice on one qubit");
      pairs.emplace_back(i0, i1);
      return;
    }
    // Anything else (single-qubit gates, measurements, headers) is not
    // relevant to routing and is skipped.
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find("//"); pos != std::string::npos) line.erase(pos);
    std::size_t start = 0;
    while (true) {
      const auto semi = line.find(';', start);
      if (semi == std::string::npos) {
        const auto frag = trim(line.substr(start));
        if (!frag.empty()) {
          if (carry.empty()) carry_line = line_no;
          carry += frag + " ";
        }
        break;
      }
      std::string stmt = carry + line.substr(start, semi - start);
      handle(stmt, carry.empty() ? line_no : carry_line);
      carry.clear();
      start = semi + 1;
    }
  }
  if (!trim(carry).empty()) {
    const auto stmt = trim(carry);
    // An unterminated qreg/cx statement is malformed; anything else would
    // have been skipped anyway.
    std::istringstream ss(stmt);
    std::string head;
    ss >> head;
    if (head == "qreg" || head == "cx" || head == "CX") {
      parse_fail(carry_line, "unterminated statement '" + stmt + "'");
    }
  }
  if (reg_size < 0) {
    throw std::runtime_error("no qreg declaration found");
  }
  return LogicalCircuit(reg_size, pairs);
}

LogicalCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open circuit: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const bool qasm = path.size() > 5 && path.rfind(".qasm") == path.size() - 5;
  try {
    return qasm ? parse_qasm(buffer.str()) : parse_gatelist(buffer.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string to_gatelist(const LogicalCircuit& circuit) {
  std::ostringstream out;
  out << "qubits " << circuit.n_qubits() << "\n";
  for (const auto& g : circuit.gates()) {
    out << g.q0 << " " << g.q1 << "\n";
  }
  return out.str();
}

std::string dump_ops(const RoutedCircuit& routed) {
  std::ostringstream out;
  for (const auto& op : routed.ops) {
    out << "t=" << op.timestep << " "
        << (op.kind == OpKind::Cnot ? "CNOT" : "SWAP") << " " << op.n0 << " "
        << op.n1;
    if (op.source_gate > 0) out << " g=" << op.source_gate;
    out << "\n";
  }
  return out.str();
}

}  // namespace qroute
