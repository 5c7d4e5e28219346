#pragma once

#include <memory>
#include <optional>
#include <stdexcept>

#include "qroute/agent.hpp"

namespace qroute {

/// Raised when an episode hits its step cap; carries the partial transcript.
class RoutingError : public std::runtime_error {
 public:
  RoutingError(const std::string& what, RoutedCircuit partial)
      : std::runtime_error(what), partial_transcript(std::move(partial)) {}

  RoutedCircuit partial_transcript;
};

/// The compiler-pass facade: runs a greedy (epsilon = 0) episode with the
/// trained model and returns the re-layered transcript. The output always
/// passes validate_routed; a step-cap abort throws RoutingError.
RoutedCircuit route(const LogicalCircuit& circuit,
                    std::shared_ptr<const Architecture> arch,
                    const Placement& placement, const Mlp& model,
                    const AgentConfig& config, Rng& rng);

/// Deterministic baseline. Per timestep, repeatedly adds the non-conflicting
/// eligible swap with the largest strict decrease in summed front-pair
/// distances (ties broken by lowest edge id) until none improves, then steps.
RoutedCircuit greedy_route(const LogicalCircuit& circuit,
                           std::shared_ptr<const Architecture> arch,
                           const Placement& placement,
                           const RewardConfig& rewards = {},
                           int step_cap_factor = 2);

/// Epsilon = 1 policy: uniformly random parallelizable eligible swap sets.
/// The paper-implied floor baseline for benchmark comparisons.
RoutedCircuit random_policy_route(const LogicalCircuit& circuit,
                                  std::shared_ptr<const Architecture> arch,
                                  const Placement& placement, Rng& rng,
                                  const RewardConfig& rewards = {},
                                  int step_cap_factor = 2);

/// Breadth-first search over (placement, progress) states with every
/// parallelizable swap set as actions; returns the minimum routed depth, or
/// nullopt when no solution exists within depth_bound. Tractable only at toy
/// scale; enforces arch <= 5 nodes, circuit <= 6 gates, bound <= 8.
std::optional<int> exhaustive_route(const LogicalCircuit& circuit,
                                    std::shared_ptr<const Architecture> arch,
                                    const Placement& placement,
                                    int depth_bound);

}  // namespace qroute
