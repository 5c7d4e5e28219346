#pragma once

#include <memory>
#include <vector>

#include "qroute/architecture.hpp"
#include "qroute/circuit.hpp"

namespace qroute {

/// Reward constants for the routing MDP. The gate reward dominates by
/// design; the distance reward is a shaping aid.
struct RewardConfig {
  double gate_reward = 1.0;
  double dist_reward = 0.1;
  double completion_reward = 5.0;
};

/// A gate executing in the current timestep. Its two nodes are protected.
struct ScheduledGate {
  int gate;  // 1-based index into the circuit
  int q0;
  int q1;
};

/// One qubit's pending interaction: the partner qubit and the gate index.
struct Interaction {
  int partner;
  int gate;
};

class RoutingState;
struct StepOutcome;
RoutingState reset(const LogicalCircuit& circuit,
                   std::shared_ptr<const Architecture> arch,
                   Placement placement);
StepOutcome step(const RoutingState& state, const std::vector<Edge>& swaps,
                 const RewardConfig& rewards);

/// Immutable value describing a point of the routing MDP: the placement,
/// per-qubit interaction queues (as cursors into shared interaction lists),
/// the gates scheduled for the current timestep, and the protected nodes.
/// Copies are cheap; the interaction lists are shared.
class RoutingState {
 public:
  const Architecture& arch() const { return *arch_; }
  const std::shared_ptr<const Architecture>& arch_ptr() const { return arch_; }
  const Placement& placement() const { return placement_; }
  int timestep() const { return timestep_; }
  int n_qubits() const { return n_qubits_; }

  /// True once every queue is empty and nothing is scheduled.
  bool done() const;

  /// Front of q's queue: the qubit q interacts with next, or -1.
  int target_of(int q) const;
  /// Gate index of q's next interaction, or 0.
  int front_gate_of(int q) const;

  int progress(int q) const { return cursor_[q]; }
  int queue_length(int q) const {
    return static_cast<int>((*interactions_)[q].size()) - cursor_[q];
  }
  /// Sum of progress and queue lengths over all qubits; always 2|G|.
  int conserved_total() const;

  const std::vector<ScheduledGate>& scheduled() const { return scheduled_; }
  bool is_protected(int node) const { return protected_[node] != 0; }
  bool is_scheduled_qubit(int q) const { return scheduled_qubit_[q] != 0; }

 private:
  RoutingState() = default;
  friend RoutingState reset(const LogicalCircuit& circuit,
                            std::shared_ptr<const Architecture> arch,
                            Placement placement);
  friend StepOutcome step(const RoutingState& state,
                          const std::vector<Edge>& swaps,
                          const RewardConfig& rewards);

  /// Rebuilds scheduled_/protected_ as every mutually-targeting pair on
  /// adjacent nodes, and returns how many gates that is.
  int schedule_ready_gates();

  std::shared_ptr<const Architecture> arch_;
  std::shared_ptr<const std::vector<std::vector<Interaction>>> interactions_;
  Placement placement_;
  std::vector<int> cursor_;            // per qubit, consumed interactions
  std::vector<ScheduledGate> scheduled_;
  std::vector<char> protected_;        // per node
  std::vector<char> scheduled_qubit_;  // per qubit
  int n_qubits_ = 0;
  int timestep_ = 1;
};

/// Result of one environment step.
struct StepOutcome {
  RoutingState next;
  double reward = 0;
  bool done = false;
  std::vector<RoutedOp> emitted;  // this timestep's CNOTs and SWAPs
  int gates_scheduled = 0;        // newly scheduled for the next timestep
  int qubits_closer = 0;          // moved strictly closer to their target
};

/// reset builds the initial state: interaction queues from the circuit's
/// gate order, every mutually-targeting adjacent pair scheduled for
/// timestep 1. Throws if the circuit has more qubits than the architecture
/// has nodes.
///
/// step advances one timestep. It emits the scheduled gates as CNOTs and
/// `swaps` as SWAPs, pops completed interactions, applies the swaps,
/// schedules the now-possible gates and computes the reward. The swap set
/// must be node-disjoint architecture edges avoiding protected nodes;
/// anything else throws (the environment never repairs its input).
inline StepOutcome step(const RoutingState& state,
                        const std::vector<Edge>& swaps) {
  return step(state, swaps, RewardConfig{});
}

/// Partial target map: result[q] is the qubit q interacts with next, or -1.
std::vector<int> qubit_targets(const RoutingState& state);

/// The condensed state representation. d[i-1] counts qubits at distance i
/// from their target (both qubits of a pending pair count); e[k] counts
/// nodes holding a target-bearing qubit with exactly k usable edges, where
/// usable means on a shortest path toward the target and touching no
/// protected node.
struct Features {
  std::vector<double> d;  // size diameter, index i-1 <-> distance i
  std::vector<double> e;  // size max_degree + 1

  std::vector<double> flatten() const;
};

Features features(const RoutingState& state);

/// Length of one state's feature vector: diameter + max_degree + 1.
int feature_length(const Architecture& arch);

/// Concatenated (d, e) vectors of a transition, exactly
/// (d_t, e_t, d_next, e_next). Throws if the states' architectures differ.
std::vector<double> pair_features(const RoutingState& s,
                                  const RoutingState& next);

}  // namespace qroute
