#include "qroute/routing_env.hpp"

#include <algorithm>
#include <stdexcept>

namespace qroute {

bool RoutingState::done() const {
  if (!scheduled_.empty()) return false;
  for (int q = 0; q < n_qubits_; ++q) {
    if (cursor_[q] < static_cast<int>((*interactions_)[q].size())) {
      return false;
    }
  }
  return true;
}

int RoutingState::target_of(int q) const {
  const auto& queue = (*interactions_)[q];
  if (cursor_[q] >= static_cast<int>(queue.size())) return -1;
  return queue[cursor_[q]].partner;
}

int RoutingState::front_gate_of(int q) const {
  const auto& queue = (*interactions_)[q];
  if (cursor_[q] >= static_cast<int>(queue.size())) return 0;
  return queue[cursor_[q]].gate;
}

int RoutingState::conserved_total() const {
  int total = 0;
  for (int q = 0; q < n_qubits_; ++q) {
    total += cursor_[q] +
             (static_cast<int>((*interactions_)[q].size()) - cursor_[q]);
  }
  return total;
}

int RoutingState::schedule_ready_gates() {
  scheduled_.clear();
  std::fill(protected_.begin(), protected_.end(), 0);
  std::fill(scheduled_qubit_.begin(), scheduled_qubit_.end(), 0);
  for (int q = 0; q < n_qubits_; ++q) {
    const int partner = target_of(q);
    if (partner < 0 || partner < q) continue;  // visit each pair once
    if (target_of(partner) != q) continue;     // not mutually targeting
    const int n0 = placement_.node_of(q);
    const int n1 = placement_.node_of(partner);
    if (!arch_->has_edge(n0, n1)) continue;
    scheduled_.push_back({front_gate_of(q), q, partner});
    protected_[n0] = protected_[n1] = 1;
    scheduled_qubit_[q] = scheduled_qubit_[partner] = 1;
  }
  return static_cast<int>(scheduled_.size());
}

RoutingState reset(const LogicalCircuit& circuit,
                   std::shared_ptr<const Architecture> arch,
                   Placement placement) {
  if (!arch) throw std::invalid_argument("null architecture");
  if (circuit.n_qubits() > arch->n_nodes()) {
    throw std::invalid_argument(
        "circuit needs " + std::to_string(circuit.n_qubits()) +
        " qubits but the architecture has " +
        std::to_string(arch->n_nodes()) + " nodes");
  }
  if (placement.n_nodes() != arch->n_nodes() || !placement.is_bijection()) {
    throw std::invalid_argument("placement is not a bijection over the nodes");
  }

  auto interactions = std::make_shared<std::vector<std::vector<Interaction>>>(
      circuit.n_qubits());
  for (const auto& g : circuit.gates()) {
    (*interactions)[g.q0].push_back({g.q1, g.index});
    (*interactions)[g.q1].push_back({g.q0, g.index});
  }

  RoutingState state;
  state.arch_ = std::move(arch);
  state.interactions_ = std::move(interactions);
  state.placement_ = std::move(placement);
  state.n_qubits_ = circuit.n_qubits();
  state.cursor_.assign(circuit.n_qubits(), 0);
  state.protected_.assign(state.arch_->n_nodes(), 0);
  state.scheduled_qubit_.assign(circuit.n_qubits(), 0);
  state.timestep_ = 1;
  state.schedule_ready_gates();
  return state;
}

StepOutcome step(const RoutingState& state, const std::vector<Edge>& swaps,
                 const RewardConfig& rewards) {
  const Architecture& arch = state.arch();
  {
    std::vector<char> seen(arch.n_nodes(), 0);
    for (const auto& [a, b] : swaps) {
      if (a < 0 || b < 0 || a >= arch.n_nodes() || b >= arch.n_nodes() ||
          !arch.has_edge(a, b)) {
        throw std::invalid_argument("swap (" + std::to_string(a) + "," +
                                    std::to_string(b) +
                                    ") is not an architecture edge");
      }
      if (state.is_protected(a) || state.is_protected(b)) {
        throw std::invalid_argument("swap (" + std::to_string(a) + "," +
                                    std::to_string(b) +
                                    ") touches a protected node");
      }
      if (seen[a] || seen[b]) {
        throw std::invalid_argument("swap set is not parallelizable");
      }
      seen[a] = seen[b] = 1;
    }
  }

  StepOutcome out{state, 0.0, false, {}, 0, 0};
  RoutingState& next = out.next;

  // Emit this timestep's operations: the scheduled gates, then the swaps.
  for (const auto& g : state.scheduled()) {
    out.emitted.push_back({OpKind::Cnot, state.placement().node_of(g.q0),
                           state.placement().node_of(g.q1), state.timestep(),
                           g.gate});
  }
  for (const auto& [a, b] : swaps) {
    out.emitted.push_back(
        {OpKind::Swap, std::min(a, b), std::max(a, b), state.timestep(), 0});
  }

  // Completed interactions leave both queues.
  for (const auto& g : state.scheduled()) {
    ++next.cursor_[g.q0];
    ++next.cursor_[g.q1];
  }
  for (const auto& [a, b] : swaps) next.placement_.apply_swap(a, b);

  out.gates_scheduled = next.schedule_ready_gates();

  // Distance-reduction count: qubits holding a target after the step, not
  // part of a newly scheduled gate, strictly closer to the target's node
  // than before the swaps.
  for (int q = 0; q < next.n_qubits(); ++q) {
    const int partner = next.target_of(q);
    if (partner < 0 || next.is_scheduled_qubit(q)) continue;
    const int before = arch.dist(state.placement().node_of(q),
                                 state.placement().node_of(partner));
    const int after = arch.dist(next.placement().node_of(q),
                                next.placement().node_of(partner));
    if (after < before) ++out.qubits_closer;
  }

  ++next.timestep_;
  out.done = next.done();
  out.reward = rewards.gate_reward * out.gates_scheduled +
               rewards.dist_reward * out.qubits_closer +
               (out.done ? rewards.completion_reward : 0.0);
  return out;
}

std::vector<int> qubit_targets(const RoutingState& state) {
  std::vector<int> targets(state.n_qubits(), -1);
  for (int q = 0; q < state.n_qubits(); ++q) targets[q] = state.target_of(q);
  return targets;
}

std::vector<double> Features::flatten() const {
  std::vector<double> out;
  out.reserve(d.size() + e.size());
  out.insert(out.end(), d.begin(), d.end());
  out.insert(out.end(), e.begin(), e.end());
  return out;
}

int feature_length(const Architecture& arch) {
  return arch.diameter() + arch.max_degree() + 1;
}

Features features(const RoutingState& state) {
  const Architecture& arch = state.arch();
  Features f;
  f.d.assign(arch.diameter(), 0.0);
  f.e.assign(arch.max_degree() + 1, 0.0);
  for (int q = 0; q < state.n_qubits(); ++q) {
    const int partner = state.target_of(q);
    if (partner < 0) continue;
    const int node = state.placement().node_of(q);
    const int target_node = state.placement().node_of(partner);
    const int dist = arch.dist(node, target_node);
    f.d[dist - 1] += 1.0;
    int usable = 0;
    for (int nb : arch.neighbors(node)) {
      if (arch.dist(nb, target_node) != dist - 1) continue;
      if (state.is_protected(node) || state.is_protected(nb)) continue;
      ++usable;
    }
    f.e[usable] += 1.0;
  }
  return f;
}

std::vector<double> pair_features(const RoutingState& s,
                                  const RoutingState& next) {
  if (s.arch_ptr().get() != next.arch_ptr().get() &&
      s.arch().id() != next.arch().id()) {
    throw std::logic_error("pair_features over mismatched architectures");
  }
  const auto a = features(s);
  const auto b = features(next);
  std::vector<double> out;
  out.reserve(2 * feature_length(s.arch()));
  out.insert(out.end(), a.d.begin(), a.d.end());
  out.insert(out.end(), a.e.begin(), a.e.end());
  out.insert(out.end(), b.d.begin(), b.d.end());
  out.insert(out.end(), b.e.begin(), b.e.end());
  return out;
}

}  // namespace qroute
