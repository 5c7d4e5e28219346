#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qroute/qvalue_model.hpp"
#include "qroute/swap_search.hpp"

namespace qroute {

/// Hyperparameters of the pair-quality DDQN agent. Every field is
/// addressable through the key=value config files (see config.hpp).
struct AgentConfig {
  double gamma = 0.95;

  double epsilon_start = 1.0;
  double epsilon_decay = 0.999;  // multiplier applied per training batch
  double epsilon_min = 0.05;

  int batch_size = 32;
  int replay_anneal_iters = 10;  // annealer probes when building TD targets
  int target_sync_interval = 500;  // environment steps between target syncs
  int episodes = 500;

  AnnealSchedule acting;  // schedule used when acting greedily
  RewardConfig rewards;

  double learning_rate = 1e-3;
  std::vector<int> hidden_dims{32, 32};
  std::size_t buffer_capacity = 50000;
  double per_alpha = 0.6;
  double per_beta_start = 0.4;
  double per_beta_end = 1.0;
  double per_epsilon = 1e-6;

  /// Episodes abort after step_cap_factor * (|G|+1) * diameter steps.
  int step_cap_factor = 2;

  int threads = 0;  // 0 = library default

  void validate() const;
};

int episode_step_cap(const AgentConfig& config, const LogicalCircuit& circuit,
                     const Architecture& arch);

/// Epsilon-greedy action selection. With probability epsilon a random
/// parallelizable eligible set (size s with P(s) proportional to 2^-s,
/// capped at the eligible count); otherwise the annealer's best set under
/// quality(a) = reward(a) + gamma * Q(pair_features(state, env(state, a))).
std::vector<Edge> select_action(const RoutingState& state, const Mlp& model,
                                double epsilon, const AnnealSchedule& schedule,
                                const RewardConfig& rewards, double gamma,
                                Rng& rng);

/// Bootstrapped target for one experience: r for terminal transitions,
/// otherwise r + gamma * max_a' [reward(a') + Q_target(pair_features(s',
/// env(s', a')))] with the max taken by a short annealing run
/// (replay_anneal_iters probes) against the target network.
double td_target(const Experience& exp, const Mlp& target_model, double gamma,
                 const AnnealSchedule& replay_schedule,
                 const RewardConfig& rewards, Rng& rng);

/// TD targets for a sampled batch. Each sample anneals independently with
/// its own derived stream, so results are identical for any thread count.
std::vector<double> td_targets(const std::vector<const Experience*>& batch,
                               const Mlp& target_model, double gamma,
                               const AnnealSchedule& replay_schedule,
                               const RewardConfig& rewards,
                               const std::vector<std::uint64_t>& seeds,
                               int threads);
std::vector<double> td_targets_serial(
    const std::vector<const Experience*>& batch, const Mlp& target_model,
    double gamma, const AnnealSchedule& replay_schedule,
    const RewardConfig& rewards, const std::vector<std::uint64_t>& seeds);

/// One line of the training log ("episode,steps,return,loss,epsilon").
struct EpisodeLog {
  int episode;
  int steps;
  double episode_return;
  double mean_loss;
  double epsilon;
  bool completed;  // false when the step cap aborted the episode
};

std::string training_log_csv(const std::vector<EpisodeLog>& log);

struct TrainResult {
  Mlp model;
  std::vector<EpisodeLog> log;
};

/// Runs the training loop: episodes over the training circuits with fresh
/// random placements, prioritized replay once the buffer holds a batch,
/// epsilon decayed per batch, target synced every target_sync_interval
/// steps. Fixed seeds give bit-identical logs.
TrainResult train(std::shared_ptr<const Architecture> arch,
                  const std::vector<LogicalCircuit>& training_circuits,
                  const AgentConfig& config, Rng& rng);

struct EvalResult {
  RoutedCircuit routed;
  DepthMetrics metrics;
};

/// Greedy (epsilon = 0) episodes over the given circuits; every transcript
/// is validated (a failure here is an environment bug and throws).
std::vector<EvalResult> evaluate(const Mlp& model,
                                 std::shared_ptr<const Architecture> arch,
                                 const std::vector<LogicalCircuit>& circuits,
                                 const std::vector<Placement>& placements,
                                 const AgentConfig& config, Rng& rng);

}  // namespace qroute
