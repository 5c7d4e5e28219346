#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qroute/agent.hpp"

namespace qroute {

/// Flat key=value configuration. Lines hold "key = value", '#' starts a
/// comment. Typed getters record which keys were read; finish() rejects
/// anything left over, so misspelled keys fail loudly.
class ConfigMap {
 public:
  ConfigMap() = default;
  static ConfigMap parse(const std::string& text);
  static ConfigMap load_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  int get_int(const std::string& key, int fallback);
  std::size_t get_size(const std::string& key, std::size_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback);

  /// Marks a key as consumed without reading it.
  void consume(const std::string& key);

  /// Throws listing every key that was never consumed.
  void finish() const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::string take(const std::string& key);

  std::map<std::string, std::string> entries_;
  std::set<std::string> consumed_;
};

/// Reads every AgentConfig field from its config key (gamma, epsilon_*,
/// batch_size, replay_anneal_iters, target_sync_interval, episodes,
/// anneal_*, *_reward, learning_rate, hidden_dims, buffer_capacity, per_*,
/// step_cap_factor, threads).
AgentConfig agent_config_from(ConfigMap& config);

}  // namespace qroute
