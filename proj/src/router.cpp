#include "qroute/router.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace qroute {

namespace {

RoutedCircuit finish_transcript(const RoutingState& final_state,
                                const Placement& initial,
                                std::vector<RoutedOp> ops) {
  RoutedCircuit routed;
  routed.arch_id = final_state.arch().id();
  routed.initial_placement = initial;
  routed.final_placement = final_state.placement();
  routed.ops = std::move(ops);
  return relayer(routed);
}

using ActionFn =
    std::function<std::vector<Edge>(const RoutingState&, int step_index)>;

RoutedCircuit run_episode(const LogicalCircuit& circuit,
                          std::shared_ptr<const Architecture> arch,
                          const Placement& placement, const ActionFn& policy,
                          const RewardConfig& rewards, int step_cap_factor,
                          const char* label) {
  RoutingState state = reset(circuit, arch, placement);
  const int cap = step_cap_factor * (circuit.n_gates() + 1) * arch->diameter();
  std::vector<RoutedOp> ops;
  int steps = 0;
  while (!state.done()) {
    if (steps >= cap) {
      throw RoutingError(
          std::string(label) + " hit the step cap after " +
              std::to_string(steps) + " steps",
          finish_transcript(state, placement, std::move(ops)));
    }
    auto outcome = step(state, policy(state, steps), rewards);
    ops.insert(ops.end(), outcome.emitted.begin(), outcome.emitted.end());
    state = std::move(outcome.next);
    ++steps;
  }
  return finish_transcript(state, placement, std::move(ops));
}

}  // namespace

RoutedCircuit route(const LogicalCircuit& circuit,
                    std::shared_ptr<const Architecture> arch,
                    const Placement& placement, const Mlp& model,
                    const AgentConfig& config, Rng& rng) {
  if (model.input_dim() != 2 * feature_length(*arch)) {
    throw std::invalid_argument(
        "model input dim " + std::to_string(model.input_dim()) +
        " does not match architecture feature length " +
        std::to_string(2 * feature_length(*arch)));
  }
  return run_episode(
      circuit, arch, placement,
      [&](const RoutingState& state, int) {
        return select_action(state, model, 0.0, config.acting, config.rewards,
                             config.gamma, rng);
      },
      config.rewards, config.step_cap_factor, "model routing");
}

RoutedCircuit greedy_route(const LogicalCircuit& circuit,
                           std::shared_ptr<const Architecture> arch,
                           const Placement& placement,
                           const RewardConfig& rewards, int step_cap_factor) {
  const Architecture& a = *arch;
  // Escort state for the stall breaker below: the mutually-targeting pair
  // currently being walked together, or (-1,-1).
  int escort_q0 = -1;
  int escort_q1 = -1;
  const auto policy = [&a, &escort_q0, &escort_q1](const RoutingState& state,
                                                   int) {
    // Sum of every target-bearing qubit's distance to its target under a
    // trial placement.
    Placement trial = state.placement();
    const auto potential = [&] {
      int total = 0;
      for (int q = 0; q < state.n_qubits(); ++q) {
        const int partner = state.target_of(q);
        if (partner < 0) continue;
        total += a.dist(trial.node_of(q), trial.node_of(partner));
      }
      return total;
    };
    std::vector<Edge> chosen;
    std::vector<char> used(a.n_nodes(), 0);

    // Stall breaker. The improving loop below can reach a local minimum of
    // the potential with nothing scheduled, where any single swap is undone
    // the following step; the episode would then idle forever. When that
    // happens, commit to the closest mutually-targeting pair and walk it
    // one hop closer per timestep, keeping its nodes off-limits to the
    // improving loop so the walk cannot be reverted. The pair's distance
    // shrinks monotonically until the gate schedules.
    if (escort_q0 >= 0) {
      const bool still_mutual = state.target_of(escort_q0) == escort_q1 &&
                                state.target_of(escort_q1) == escort_q0 &&
                                !state.is_scheduled_qubit(escort_q0);
      if (!still_mutual) escort_q0 = escort_q1 = -1;
    }
    const auto escort_hop = [&] {
      const int n0 = state.placement().node_of(escort_q0);
      const int n1 = state.placement().node_of(escort_q1);
      const int dist = a.dist(n0, n1);
      for (const auto& edge : a.edges()) {
        if (state.is_protected(edge.first) || state.is_protected(edge.second)) {
          continue;
        }
        const bool at_n0 = edge.first == n0 || edge.second == n0;
        const bool at_n1 = edge.first == n1 || edge.second == n1;
        if (!at_n0 && !at_n1) continue;
        const int anchor = at_n0 ? n0 : n1;
        const int other = anchor == edge.first ? edge.second : edge.first;
        const int goal = at_n0 ? n1 : n0;
        if (a.dist(other, goal) == dist - 1) {
          chosen.push_back(edge);
          trial.apply_swap(edge.first, edge.second);
          used[edge.first] = used[edge.second] = 1;
          break;
        }
      }
      // Freeze both escort nodes even when no hop edge was free; another
      // swap dragging the pair around would defeat the escort.
      used[state.placement().node_of(escort_q0)] = 1;
      used[state.placement().node_of(escort_q1)] = 1;
    };
    if (escort_q0 >= 0) escort_hop();

    int current = potential();
    while (true) {
      int best_gain = 0;
      int best_edge = -1;
      int best_potential = current;
      for (std::size_t i = 0; i < a.edges().size(); ++i) {
        const auto& [n0, n1] = a.edges()[i];
        if (state.is_protected(n0) || state.is_protected(n1)) continue;
        if (used[n0] || used[n1]) continue;
        trial.apply_swap(n0, n1);
        const int candidate = potential();
        trial.apply_swap(n0, n1);
        if (current - candidate > best_gain) {
          best_gain = current - candidate;
          best_edge = static_cast<int>(i);
          best_potential = candidate;
        }
      }
      if (best_edge < 0) break;
      const auto& [n0, n1] = a.edges()[best_edge];
      chosen.push_back(a.edges()[best_edge]);
      used[n0] = used[n1] = 1;
      trial.apply_swap(n0, n1);
      current = best_potential;
    }

    if (chosen.empty() && state.scheduled().empty() && escort_q0 < 0) {
      int best_q = -1, best_dist = 0;
      for (int q = 0; q < state.n_qubits(); ++q) {
        const int partner = state.target_of(q);
        if (partner < q) continue;
        if (state.target_of(partner) != q) continue;
        const int d = a.dist(state.placement().node_of(q),
                             state.placement().node_of(partner));
        if (best_q < 0 || d < best_dist) {
          best_q = q;
          best_dist = d;
        }
      }
      if (best_q >= 0) {
        escort_q0 = best_q;
        escort_q1 = state.target_of(best_q);
        escort_hop();
      }
    }
    return chosen;
  };
  return run_episode(circuit, arch, placement, policy, rewards,
                     step_cap_factor, "greedy routing");
}

RoutedCircuit random_policy_route(const LogicalCircuit& circuit,
                                  std::shared_ptr<const Architecture> arch,
                                  const Placement& placement, Rng& rng,
                                  const RewardConfig& rewards,
                                  int step_cap_factor) {
  // select_action with epsilon = 1 never consults a model; a 1-unit dummy
  // network keeps the signature satisfied.
  Rng init(0);
  const Mlp dummy({2 * feature_length(*arch), 1}, init);
  AnnealSchedule schedule;
  return run_episode(
      circuit, arch, placement,
      [&](const RoutingState& state, int) {
        return select_action(state, dummy, 1.0, schedule, rewards, 0.95, rng);
      },
      rewards, step_cap_factor, "random routing");
}

std::optional<int> exhaustive_route(const LogicalCircuit& circuit,
                                    std::shared_ptr<const Architecture> arch,
                                    const Placement& placement,
                                    int depth_bound) {
  if (arch->n_nodes() > 5 || circuit.n_gates() > 6 || depth_bound > 8) {
    throw std::invalid_argument(
        "exhaustive search is restricted to <= 5 nodes, <= 6 gates, "
        "bound <= 8");
  }
  RoutingState start = reset(circuit, arch, placement);
  if (start.done()) return 0;

  using Key = std::pair<std::vector<int>, std::vector<int>>;
  const auto key_of = [](const RoutingState& s) {
    std::vector<int> progress(s.n_qubits());
    for (int q = 0; q < s.n_qubits(); ++q) progress[q] = s.progress(q);
    return Key{s.placement().node_to_qubit, std::move(progress)};
  };

  std::map<Key, char> seen;
  std::deque<RoutingState> frontier{std::move(start)};
  seen[key_of(frontier.front())] = 1;

  for (int depth = 1; depth <= depth_bound; ++depth) {
    std::deque<RoutingState> next_frontier;
    for (const auto& state : frontier) {
      const auto eligible = eligible_edges(state);
      // Enumerate every parallelizable subset of the eligible edges.
      std::vector<Edge> subset;
      std::vector<char> used(arch->n_nodes(), 0);
      bool found_done = false;
      const std::function<void(std::size_t)> enumerate =
          [&](std::size_t i) {
            if (found_done) return;
            if (i == eligible.size()) {
              auto outcome = step(state, subset);
              if (outcome.done) {
                found_done = true;
                return;
              }
              auto key = key_of(outcome.next);
              if (!seen.contains(key)) {
                seen[std::move(key)] = 1;
                next_frontier.push_back(std::move(outcome.next));
              }
              return;
            }
            enumerate(i + 1);
            const auto& [n0, n1] = eligible[i];
            if (!used[n0] && !used[n1]) {
              used[n0] = used[n1] = 1;
              subset.push_back(eligible[i]);
              enumerate(i + 1);
              subset.pop_back();
              used[n0] = used[n1] = 0;
            }
          };
      enumerate(0);
      if (found_done) return depth;
    }
    frontier = std::move(next_frontier);
    if (frontier.empty()) break;
  }
  return std::nullopt;
}

}  // namespace qroute
