#pragma once

#include <functional>
#include <vector>

#include "qroute/routing_env.hpp"

namespace qroute {

/// Simulated-annealing temperature schedule. The temperature decays by a
/// fixed multiplier per evaluated candidate until it falls below t_min or
/// the probe cap is reached.
struct AnnealSchedule {
  double t_initial = 1.0;
  double decay = 0.9;
  double t_min = 1e-3;
  int max_iters = 200;

  void validate() const;
};

/// Architecture edges whose endpoints are both unprotected in `state`.
std::vector<Edge> eligible_edges(const RoutingState& state);

/// True iff no node appears in two edges of the set.
bool is_parallelizable(const std::vector<Edge>& swaps);

/// Metropolis acceptance per the annealer: exp((cand - cur)/t) for
/// non-improving candidates, 1 otherwise. Temperature must be positive.
double acceptance_probability(double q_current, double q_candidate,
                              double temperature);

struct AnnealResult {
  std::vector<Edge> swaps;  // sorted by edge id
  double quality = 0;
  int probes = 0;  // quality evaluations performed (empty set included)
};

/// Searches over parallelizable swap sets for the one maximizing `quality`.
/// The chain starts from a random eligible single swap and moves by toggling
/// one eligible edge per iteration; non-parallelizable candidates are
/// rejected without decaying the temperature. The empty set is always
/// evaluated, so the returned quality is at least quality({}). Returns the
/// best candidate ever visited.
AnnealResult anneal_action(const RoutingState& state,
                           const std::function<double(
                               const std::vector<Edge>&)>& quality,
                           const AnnealSchedule& schedule, Rng& rng);

}  // namespace qroute
