#include "qroute/swap_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qroute {

void AnnealSchedule::validate() const {
  if (t_initial <= 0 || t_min <= 0 || t_min >= t_initial) {
    throw std::invalid_argument("annealer needs 0 < t_min < t_initial");
  }
  if (decay <= 0 || decay >= 1) {
    throw std::invalid_argument("annealer decay must lie in (0,1)");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("annealer needs at least one probe");
  }
}

std::vector<Edge> eligible_edges(const RoutingState& state) {
  std::vector<Edge> out;
  for (const auto& e : state.arch().edges()) {
    if (!state.is_protected(e.first) && !state.is_protected(e.second)) {
      out.push_back(e);
    }
  }
  return out;
}

bool is_parallelizable(const std::vector<Edge>& swaps) {
  std::vector<int> nodes;
  nodes.reserve(swaps.size() * 2);
  for (const auto& [a, b] : swaps) {
    nodes.push_back(a);
    nodes.push_back(b);
  }
  std::sort(nodes.begin(), nodes.end());
  return std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end();
}

double acceptance_probability(double q_current, double q_candidate,
                              double temperature) {
  if (temperature <= 0) {
    throw std::invalid_argument("temperature must be positive");
  }
  if (q_candidate > q_current) return 1.0;
  return std::exp((q_candidate - q_current) / temperature);
}

namespace {

std::vector<Edge> selected_edges(const std::vector<Edge>& eligible,
                                 const std::vector<char>& mask) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (mask[i]) out.push_back(eligible[i]);
  }
  return out;
}

}  // namespace

AnnealResult anneal_action(
    const RoutingState& state,
    const std::function<double(const std::vector<Edge>&)>& quality,
    const AnnealSchedule& schedule, Rng& rng) {
  schedule.validate();
  const auto eligible = eligible_edges(state);
  const std::size_t n = eligible.size();

  AnnealResult result;
  result.quality = quality({});
  result.probes = 1;
  if (n == 0) return result;

  // Node-occupancy bookkeeping makes the parallelizability of a toggle an
  // O(1) check.
  std::vector<char> mask(n, 0);
  std::vector<int> node_used(state.arch().n_nodes(), 0);
  auto toggle = [&](std::size_t i) {
    const int delta = mask[i] ? -1 : 1;
    mask[i] = !mask[i];
    node_used[eligible[i].first] += delta;
    node_used[eligible[i].second] += delta;
  };
  auto toggle_conflicts = [&](std::size_t i) {
    return !mask[i] && (node_used[eligible[i].first] > 0 ||
                        node_used[eligible[i].second] > 0);
  };

  const std::size_t start = rng.uniform_below(n);
  toggle(start);
  double current = quality(selected_edges(eligible, mask));
  ++result.probes;
  if (current > result.quality) {
    result.quality = current;
    result.swaps = selected_edges(eligible, mask);
  }

  double temperature = schedule.t_initial;
  while (result.probes < schedule.max_iters && temperature > schedule.t_min) {
    const std::size_t pick = rng.uniform_below(n);
    if (toggle_conflicts(pick)) {
      // Disqualified without decaying the temperature, but still a probe so
      // the loop always terminates.
      ++result.probes;
      continue;
    }
    toggle(pick);
    const double candidate = quality(selected_edges(eligible, mask));
    ++result.probes;
    if (candidate > result.quality) {
      result.quality = candidate;
      result.swaps = selected_edges(eligible, mask);
    }
    if (rng.uniform01() < acceptance_probability(current, candidate,
                                                 temperature)) {
      current = candidate;
    } else {
      toggle(pick);  // rejected, restore the chain state
    }
    temperature *= schedule.decay;
  }
  return result;
}

}  // namespace qroute
