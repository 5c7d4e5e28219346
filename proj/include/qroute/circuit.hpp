#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qroute/architecture.hpp"

namespace qroute {

/// A two-qubit gate. `index` is the 1-based position in the circuit.
struct LogicalGate {
  int index;
  int q0;
  int q1;
};

/// Ordered list of two-qubit gates over logical qubits. Single-qubit gates
/// are irrelevant to routing and never appear here.
class LogicalCircuit {
 public:
  LogicalCircuit() = default;

  /// Validates qubit ids and assigns contiguous 1-based gate indices.
  LogicalCircuit(int n_qubits, const std::vector<std::pair<int, int>>& pairs);

  int n_qubits() const { return n_qubits_; }
  const std::vector<LogicalGate>& gates() const { return gates_; }
  int n_gates() const { return static_cast<int>(gates_.size()); }
  bool empty() const { return gates_.empty(); }

 private:
  int n_qubits_ = 0;
  std::vector<LogicalGate> gates_;
};

enum class OpKind { Cnot, Swap };

/// One operation of a routed circuit, acting on architecture nodes.
/// `source_gate` links a CNOT back to the logical gate it implements;
/// 0 marks untagged CNOTs (these only arise from SWAP decomposition).
struct RoutedOp {
  OpKind kind;
  int n0;
  int n1;
  int timestep;  // 1-based
  int source_gate = 0;
};

/// Timestep-stamped operations over nodes, together with the placements
/// they start from and end at.
struct RoutedCircuit {
  std::string arch_id;
  Placement initial_placement;
  Placement final_placement;
  std::vector<RoutedOp> ops;

  int swap_count() const;
};

/// Exact depth overhead metrics per routed circuit. The ratio is kept as a
/// reduced fraction so point checks like 7/6 are representable exactly.
struct DepthMetrics {
  int original_depth = 0;
  int routed_depth = 0;
  int cdo = 0;
  long long cdr_num = 0;
  long long cdr_den = 1;

  double cdr() const {
    return static_cast<double>(cdr_num) / static_cast<double>(cdr_den);
  }
};

/// Circuit depth: the minimum number of parallel layers under greedy
/// as-soon-as-possible layering. Folds per-qubit depth counters over the
/// gate list; the maximum counter is the depth.
int circuit_depth(const LogicalCircuit& circuit);

/// Greedy earliest-timestep layer assignment. Layer k holds exactly the
/// gates whose folded depth value is k+1; concatenating layers preserves
/// per-qubit gate order.
std::vector<std::vector<LogicalGate>> decompose_layers(
    const LogicalCircuit& circuit);

/// CDO = routed - original, CDR = routed/original as a reduced fraction.
/// Throws if original_depth is zero (undefined ratio) or routed < original.
DepthMetrics cdo_cdr(int original_depth, int routed_depth);

/// Largest timestep in the op list (0 when empty).
int routed_depth(const RoutedCircuit& routed);

/// Reassigns timesteps by greedy per-node folding, preserving per-node op
/// order, and returns the ops sorted by (timestep, original position).
/// Removes interior and trailing empty timesteps.
RoutedCircuit relayer(const RoutedCircuit& routed);

/// Replaces every SWAP with three sequential CNOTs on the same node pair
/// (same orientation; the graph is undirected) and re-layers the result.
RoutedCircuit decompose_swaps(const RoutedCircuit& routed);

/// One validator finding; `op_index` is the position in `ops` or -1 for
/// whole-circuit findings.
struct Violation {
  enum class Check {
    NonEdge,         // op's node pair is not an architecture edge
    WrongNodes,      // tagged CNOT's nodes do not hold ts gate's qubits
    OrderBroken,     // tagged CNOT out of per-qubit gate order
    MissingGate,     // an original gate never appears, or appears twice
    NodeReuse,       // node used by two ops in one timestep
    BadSwapTriple,   // untagged CNOTs do not form decomposed-SWAP triples
    PlacementDrift,  // replay does not end at the recorded final placement
    BadOp,           // malformed op (node out of range, bad timestep, ...)
  };
  Check check;
  int op_index;
  std::string message;
};

/// Replays the routed circuit against the original and reports every
/// contract violation found (empty result = valid). See Violation::Check
/// for the individual checks.
std::vector<Violation> validate_routed(const LogicalCircuit& original,
                                       const RoutedCircuit& routed,
                                       const Architecture& arch);

/// Gate-list text: optional "qubits N" header, one "q0 q1" pair per line,
/// '#' comments, LF or CRLF. Without a header the qubit count is inferred.
LogicalCircuit parse_gatelist(std::string_view text);

/// OpenQASM subset: recognizes "qreg name[N];" (one register only) and
/// "cx name[i],name[j];". Everything else is skipped.
LogicalCircuit parse_qasm(std::string_view text);

/// Loads a circuit file, choosing the parser by extension (".qasm" uses the
/// QASM subset, anything else the gate-list format).
LogicalCircuit load_circuit(const std::string& path);

std::string to_gatelist(const LogicalCircuit& circuit);

/// One op per line: "t=<timestep> <CNOT|SWAP> <n0> <n1> [g=<gate index>]".
std::string dump_ops(const RoutedCircuit& routed);

}  // namespace qroute
