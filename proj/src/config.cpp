#include "qroute/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qroute {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.erase(s.begin());
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text) {
  ConfigMap config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }
    if (config.entries_.count(key)) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    }
    config.entries_[key] = value;
  }
  return config;
}

ConfigMap ConfigMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

bool ConfigMap::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string ConfigMap::take(const std::string& key) {
  consumed_.insert(key);
  return entries_.at(key);
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) {
  consumed_.insert(key);
  return has(key) ? entries_.at(key) : fallback;
}

int ConfigMap::get_int(const std::string& key, int fallback) {
  if (!has(key)) {
    consumed_.insert(key);
    return fallback;
  }
  try {
    return std::stoi(take(key));
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' is not an integer");
  }
}

std::size_t ConfigMap::get_size(const std::string& key, std::size_t fallback) {
  if (!has(key)) {
    consumed_.insert(key);
    return fallback;
  }
  try {
    const long long v = std::stoll(take(key));
    if (v < 0) throw std::invalid_argument("negative");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' is not a non-negative integer");
  }
}

double ConfigMap::get_double(const std::string& key, double fallback) {
  if (!has(key)) {
    consumed_.insert(key);
    return fallback;
  }
  try {
    return std::stod(take(key));
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' is not a number");
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) {
    consumed_.insert(key);
    return fallback;
  }
  const auto v = take(key);
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "' is not a boolean");
}

std::vector<int> ConfigMap::get_int_list(const std::string& key,
                                         const std::vector<int>& fallback) {
  if (!has(key)) {
    consumed_.insert(key);
    return fallback;
  }
  const auto v = take(key);
  std::vector<int> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(trim(item)));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key +
                                  "' is not a comma-separated integer list");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("config key '" + key + "' is empty");
  }
  return out;
}

void ConfigMap::consume(const std::string& key) { consumed_.insert(key); }

void ConfigMap::finish() const {
  std::string unknown;
  for (const auto& [key, value] : entries_) {
    if (!consumed_.count(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw std::invalid_argument("unknown config key(s): " + unknown);
  }
}

AgentConfig agent_config_from(ConfigMap& config) {
  AgentConfig c;
  c.gamma = config.get_double("gamma", c.gamma);
  c.epsilon_start = config.get_double("epsilon_start", c.epsilon_start);
  c.epsilon_decay = config.get_double("epsilon_decay", c.epsilon_decay);
  c.epsilon_min = config.get_double("epsilon_min", c.epsilon_min);
  c.batch_size = config.get_int("batch_size", c.batch_size);
  c.replay_anneal_iters =
      config.get_int("replay_anneal_iters", c.replay_anneal_iters);
  c.target_sync_interval =
      config.get_int("target_sync_interval", c.target_sync_interval);
  c.episodes = config.get_int("episodes", c.episodes);
  c.acting.t_initial = config.get_double("anneal_t_initial",
                                         c.acting.t_initial);
  c.acting.decay = config.get_double("anneal_decay", c.acting.decay);
  c.acting.t_min = config.get_double("anneal_t_min", c.acting.t_min);
  c.acting.max_iters = config.get_int("anneal_max_iters", c.acting.max_iters);
  c.rewards.gate_reward = config.get_double("gate_reward",
                                            c.rewards.gate_reward);
  c.rewards.dist_reward = config.get_double("dist_reward",
                                            c.rewards.dist_reward);
  c.rewards.completion_reward =
      config.get_double("completion_reward", c.rewards.completion_reward);
  c.learning_rate = config.get_double("learning_rate", c.learning_rate);
  c.hidden_dims = config.get_int_list("hidden_dims", c.hidden_dims);
  c.buffer_capacity = config.get_size("buffer_capacity", c.buffer_capacity);
  c.per_alpha = config.get_double("per_alpha", c.per_alpha);
  c.per_beta_start = config.get_double("per_beta_start", c.per_beta_start);
  c.per_beta_end = config.get_double("per_beta_end", c.per_beta_end);
  c.per_epsilon = config.get_double("per_epsilon", c.per_epsilon);
  c.step_cap_factor = config.get_int("step_cap_factor", c.step_cap_factor);
  c.threads = config.get_int("threads", c.threads);
  c.validate();
  return c;
}

}  // namespace qroute
