#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qroute/rng.hpp"
#include "qroute/routing_env.hpp"

namespace qroute {

/// Scalar-output feed-forward network: rectifier hidden layers, identity
/// output. Weights are fan-in-scaled uniform at construction. Training uses
/// gradient descent with per-parameter moment estimates (Adam). Prediction
/// is const and safe to share across threads; training is single-writer.
class Mlp {
 public:
  /// dims = input, hidden..., 1. The last dimension must be 1.
  Mlp(std::vector<int> dims, Rng& rng);

  double predict(std::span<const double> input) const;

  /// One update on the weighted squared TD error. Returns the pre-update
  /// mean loss. Targets must be finite.
  double train_batch(const std::vector<std::vector<double>>& inputs,
                     const std::vector<double>& targets,
                     const std::vector<double>& weights, double learning_rate);

  /// Mean weighted squared loss without updating; used by gradient checks.
  double loss(const std::vector<std::vector<double>>& inputs,
              const std::vector<double>& targets,
              const std::vector<double>& weights) const;

  /// Analytic d(loss)/d(params) as a flat vector in params() order.
  std::vector<double> gradient(const std::vector<std::vector<double>>& inputs,
                               const std::vector<double>& targets,
                               const std::vector<double>& weights) const;

  std::vector<double> params() const;
  void set_params(std::span<const double> flat);
  std::size_t n_params() const;

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }

  /// Versioned plain-text format: "qroute-model v1" header, architecture id
  /// line, layer dims line, then row-major weights and biases per layer in
  /// scientific notation with 17 significant digits (bit-exact round trip).
  void save(std::ostream& out, const std::string& arch_id) const;
  void save_file(const std::string& path, const std::string& arch_id) const;
  static std::pair<Mlp, std::string> load(std::istream& in);
  static std::pair<Mlp, std::string> load_file(const std::string& path);

 private:
  explicit Mlp(std::vector<int> dims);

  // Backpropagation over one sample; adds into flat gradient accumulators.
  double accumulate_gradient(std::span<const double> input, double target,
                             double weight, double inv_batch,
                             std::vector<std::vector<double>>& grad_w,
                             std::vector<std::vector<double>>& grad_b) const;

  std::vector<int> dims_;
  std::vector<std::vector<double>> weights_;  // [layer][out*in], row-major
  std::vector<std::vector<double>> biases_;   // [layer][out]

  // Adam state
  std::vector<double> adam_m_, adam_v_;
  long long adam_t_ = 0;
};

/// Creates an independent copy for DDQN target evaluation. Subsequent
/// training of the online model leaves the copy untouched.
inline Mlp sync_target(const Mlp& online) { return online; }

/// One observed transition. Full state snapshots are stored because replay
/// re-anneals from the next state with the target model.
struct Experience {
  RoutingState state;
  RoutingState next_state;
  double reward = 0;
  bool done = false;
};

/// Prioritized replay: ring buffer with a sum tree over priority^alpha for
/// O(log n) sampling and priority updates. New items enter at the running
/// maximum priority so they are replayed at least once.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double alpha, double priority_epsilon);

  void add(Experience exp);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t id) const { return storage_[id]; }

  struct Batch {
    std::vector<std::size_t> ids;
    std::vector<double> weights;  // importance weights, max-normalized
  };

  /// Draws k ids with probability proportional to priority^alpha and
  /// returns importance weights (N*P)^-beta normalized by the batch max.
  /// Throws when empty.
  Batch sample(std::size_t k, double beta, Rng& rng);

  /// Sets priorities to |td_error| + priority_epsilon.
  void update_priorities(const std::vector<std::size_t>& ids,
                         const std::vector<double>& td_errors);

  double priority_of(std::size_t id) const { return priorities_[id]; }

 private:
  void set_leaf(std::size_t id, double priority);

  std::size_t capacity_;
  double alpha_;
  double priority_epsilon_;
  std::vector<Experience> storage_;
  std::vector<double> priorities_;
  std::vector<double> tree_;  // sum tree over priority^alpha, leaves at cap_
  std::size_t tree_base_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace qroute
