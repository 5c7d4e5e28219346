#include "qroute/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qroute {

void AgentConfig::validate() const {
  if (gamma <= 0 || gamma > 1) throw std::invalid_argument("gamma in (0,1]");
  if (epsilon_start < epsilon_min || epsilon_min < 0 || epsilon_start > 1) {
    throw std::invalid_argument("need 0 <= epsilon_min <= epsilon_start <= 1");
  }
  if (epsilon_decay <= 0 || epsilon_decay > 1) {
    throw std::invalid_argument("epsilon_decay in (0,1]");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size >= 1");
  if (replay_anneal_iters < 1) {
    throw std::invalid_argument("replay_anneal_iters >= 1");
  }
  if (target_sync_interval < 1) {
    throw std::invalid_argument("target_sync_interval >= 1");
  }
  if (episodes < 0) throw std::invalid_argument("episodes >= 0");
  if (learning_rate <= 0) throw std::invalid_argument("learning_rate > 0");
  if (step_cap_factor < 1) throw std::invalid_argument("step_cap_factor >= 1");
  acting.validate();
}

int episode_step_cap(const AgentConfig& config, const LogicalCircuit& circuit,
                     const Architecture& arch) {
  return config.step_cap_factor * (circuit.n_gates() + 1) * arch.diameter();
}

namespace {

/// Random parallelizable eligible swap set: size s drawn with
/// P(s) proportional to 2^-s (s = 0..eligible count), then edges taken
/// greedily from a shuffled eligible list until s are found.
std::vector<Edge> random_action(const RoutingState& state, Rng& rng) {
  auto eligible = eligible_edges(state);
  if (eligible.empty()) return {};
  const int cap = static_cast<int>(eligible.size());
  // P(s) proportional to 2^-s over s = 0..cap: draw via cumulative weights.
  // Total = 2 - 2^-cap; using integer weights 2^(cap-s) avoids rounding.
  double total = 0;
  for (int s = 0; s <= cap; ++s) total += std::ldexp(1.0, -s);
  double r = rng.uniform01() * total;
  int size = cap;
  for (int s = 0; s <= cap; ++s) {
    const double w = std::ldexp(1.0, -s);
    if (r < w) {
      size = s;
      break;
    }
    r -= w;
  }
  if (size == 0) return {};
  rng.shuffle(eligible);
  std::vector<Edge> chosen;
  std::vector<char> used(state.arch().n_nodes(), 0);
  for (const auto& e : eligible) {
    if (used[e.first] || used[e.second]) continue;
    chosen.push_back(e);
    used[e.first] = used[e.second] = 1;
    if (static_cast<int>(chosen.size()) == size) break;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::vector<Edge> select_action(const RoutingState& state, const Mlp& model,
                                double epsilon, const AnnealSchedule& schedule,
                                const RewardConfig& rewards, double gamma,
                                Rng& rng) {
  if (state.done()) {
    throw std::logic_error("select_action on a terminal state");
  }
  if (epsilon > 0 && rng.bernoulli(epsilon)) {
    return random_action(state, rng);
  }
  const auto quality = [&](const std::vector<Edge>& swaps) {
    const auto outcome = step(state, swaps, rewards);
    return outcome.reward +
           gamma * model.predict(pair_features(state, outcome.next));
  };
  return anneal_action(state, quality, schedule, rng).swaps;
}

double td_target(const Experience& exp, const Mlp& target_model, double gamma,
                 const AnnealSchedule& replay_schedule,
                 const RewardConfig& rewards, Rng& rng) {
  if (exp.done) return exp.reward;
  const auto quality = [&](const std::vector<Edge>& swaps) {
    const auto outcome = step(exp.next_state, swaps, rewards);
    return outcome.reward +
           target_model.predict(pair_features(exp.next_state, outcome.next));
  };
  const auto best =
      anneal_action(exp.next_state, quality, replay_schedule, rng);
  return exp.reward + gamma * best.quality;
}

std::vector<double> td_targets_serial(
    const std::vector<const Experience*>& batch, const Mlp& target_model,
    double gamma, const AnnealSchedule& replay_schedule,
    const RewardConfig& rewards, const std::vector<std::uint64_t>& seeds) {
  if (batch.size() != seeds.size()) {
    throw std::logic_error("need one seed per sample");
  }
  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng(seeds[i]);
    targets[i] = td_target(*batch[i], target_model, gamma, replay_schedule,
                           rewards, rng);
  }
  return targets;
}

std::vector<double> td_targets(const std::vector<const Experience*>& batch,
                               const Mlp& target_model, double gamma,
                               const AnnealSchedule& replay_schedule,
                               const RewardConfig& rewards,
                               const std::vector<std::uint64_t>& seeds,
                               int threads) {
  if (batch.size() != seeds.size()) {
    throw std::logic_error("need one seed per sample");
  }
  std::vector<double> targets(batch.size());
  const int n = static_cast<int>(batch.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (int i = 0; i < n; ++i) {
    Rng rng(seeds[i]);
    targets[i] = td_target(*batch[i], target_model, gamma, replay_schedule,
                           rewards, rng);
  }
  return targets;
}

std::string training_log_csv(const std::vector<EpisodeLog>& log) {
  std::ostringstream out;
  out << "episode,steps,return,loss,epsilon\n";
  char buf[128];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%.6f\n", row.episode,
                  row.steps, row.episode_return, row.mean_loss, row.epsilon);
    out << buf;
  }
  return out.str();
}

TrainResult train(std::shared_ptr<const Architecture> arch,
                  const std::vector<LogicalCircuit>& training_circuits,
                  const AgentConfig& config, Rng& rng) {
  config.validate();
  if (!arch) throw std::invalid_argument("null architecture");

  std::vector<int> dims;
  dims.push_back(2 * feature_length(*arch));
  dims.insert(dims.end(), config.hidden_dims.begin(),
              config.hidden_dims.end());
  dims.push_back(1);
  Mlp online(dims, rng);
  if (config.episodes == 0) return {std::move(online), {}};
  if (training_circuits.empty()) {
    throw std::invalid_argument("training set is empty");
  }

  Mlp target = sync_target(online);
  ReplayBuffer buffer(config.buffer_capacity, config.per_alpha,
                      config.per_epsilon);
  AnnealSchedule replay_schedule = config.acting;
  replay_schedule.max_iters = config.replay_anneal_iters;

  double epsilon = config.epsilon_start;
  long long global_step = 0;
  std::vector<EpisodeLog> log;
  log.reserve(config.episodes);

  for (int ep = 0; ep < config.episodes; ++ep) {
    const auto& circuit = training_circuits[ep % training_circuits.size()];
    const int cap = episode_step_cap(config, circuit, *arch);
    const double beta =
        config.per_beta_start +
        (config.per_beta_end - config.per_beta_start) *
            (config.episodes > 1
                 ? static_cast<double>(ep) / (config.episodes - 1)
                 : 1.0);

    RoutingState state =
        reset(circuit, arch, random_placement(*arch, circuit.n_qubits(), rng));
    double episode_return = 0;
    double loss_sum = 0;
    int loss_count = 0;
    int steps = 0;

    while (!state.done() && steps < cap) {
      const auto action = select_action(state, online, epsilon, config.acting,
                                        config.rewards, config.gamma, rng);
      auto outcome = step(state, action, config.rewards);
      episode_return += outcome.reward;
      buffer.add({state, outcome.next, outcome.reward, outcome.done});
      state = std::move(outcome.next);
      ++steps;
      ++global_step;

      if (buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
        auto batch = buffer.sample(config.batch_size, beta, rng);
        std::vector<const Experience*> samples;
        std::vector<std::uint64_t> seeds;
        samples.reserve(batch.ids.size());
        seeds.reserve(batch.ids.size());
        for (std::size_t id : batch.ids) {
          samples.push_back(&buffer.at(id));
          seeds.push_back(rng.next_u64());
        }
        const auto targets =
            td_targets(samples, target, config.gamma, replay_schedule,
                       config.rewards, seeds, config.threads);

        std::vector<std::vector<double>> inputs;
        std::vector<double> td_errors;
        inputs.reserve(samples.size());
        td_errors.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
          inputs.push_back(
              pair_features(samples[i]->state, samples[i]->next_state));
          td_errors.push_back(online.predict(inputs.back()) - targets[i]);
        }
        loss_sum += online.train_batch(inputs, targets, batch.weights,
                                       config.learning_rate);
        ++loss_count;
        buffer.update_priorities(batch.ids, td_errors);
        epsilon = std::max(config.epsilon_min, epsilon * config.epsilon_decay);
      }
      if (global_step % config.target_sync_interval == 0) {
        target = sync_target(online);
      }
    }
    log.push_back({ep, steps, episode_return,
                   loss_count ? loss_sum / loss_count : 0.0, epsilon,
                   state.done()});
  }
  return {std::move(online), std::move(log)};
}

std::vector<EvalResult> evaluate(const Mlp& model,
                                 std::shared_ptr<const Architecture> arch,
                                 const std::vector<LogicalCircuit>& circuits,
                                 const std::vector<Placement>& placements,
                                 const AgentConfig& config, Rng& rng) {
  if (circuits.size() != placements.size()) {
    throw std::invalid_argument("need one placement per circuit");
  }
  if (model.input_dim() != 2 * feature_length(*arch)) {
    throw std::invalid_argument(
        "model input dim " + std::to_string(model.input_dim()) +
        " does not match architecture feature length " +
        std::to_string(2 * feature_length(*arch)));
  }
  std::vector<EvalResult> results;
  results.reserve(circuits.size());
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const auto& circuit = circuits[i];
    const int cap = episode_step_cap(config, circuit, *arch);
    RoutingState state = reset(circuit, arch, placements[i]);
    RoutedCircuit routed;
    routed.arch_id = arch->id();
    routed.initial_placement = placements[i];
    int steps = 0;
    while (!state.done()) {
      if (steps >= cap) {
        throw std::runtime_error("evaluation hit the step cap on circuit " +
                                 std::to_string(i));
      }
      const auto action = select_action(state, model, 0.0, config.acting,
                                        config.rewards, config.gamma, rng);
      auto outcome = step(state, action, config.rewards);
      routed.ops.insert(routed.ops.end(), outcome.emitted.begin(),
                        outcome.emitted.end());
      state = std::move(outcome.next);
      ++steps;
    }
    routed.final_placement = state.placement();
    routed = relayer(routed);
    const auto violations = validate_routed(circuit, routed, *arch);
    if (!violations.empty()) {
      throw std::runtime_error("environment bug: transcript failed "
                               "validation: " + violations.front().message);
    }
    EvalResult r{std::move(routed), {}};
    if (circuit.n_gates() > 0) {
      r.metrics = cdo_cdr(circuit_depth(circuit), routed_depth(r.routed));
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace qroute
