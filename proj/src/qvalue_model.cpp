#include "qroute/qvalue_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qroute {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("mlp needs >= 2 dims");
  if (dims_.back() != 1) throw std::invalid_argument("mlp output must be scalar");
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("mlp dims must be positive");
  }
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weights_.emplace_back(static_cast<std::size_t>(dims_[l + 1]) * dims_[l],
                          0.0);
    biases_.emplace_back(dims_[l + 1], 0.0);
  }
  adam_m_.assign(n_params(), 0.0);
  adam_v_.assign(n_params(), 0.0);
}

Mlp::Mlp(std::vector<int> dims, Rng& rng) : Mlp(std::move(dims)) {
  // Fan-in-scaled uniform init, zero biases.
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    for (auto& w : weights_[l]) {
      w = (2.0 * rng.uniform01() - 1.0) * bound;
    }
  }
}

double Mlp::predict(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != dims_.front()) {
    throw std::logic_error("mlp input length " +
                           std::to_string(input.size()) + " != " +
                           std::to_string(dims_.front()));
  }
  std::vector<double> act(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const int in_dim = dims_[l];
    const int out_dim = dims_[l + 1];
    next.assign(out_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) {
      double z = biases_[l][o];
      const double* row = &weights_[l][static_cast<std::size_t>(o) * in_dim];
      for (int i = 0; i < in_dim; ++i) z += row[i] * act[i];
      next[o] = (l + 1 < weights_.size()) ? std::max(0.0, z) : z;
    }
    act.swap(next);
  }
  return act[0];
}

double Mlp::accumulate_gradient(
    std::span<const double> input, double target, double weight,
    double inv_batch, std::vector<std::vector<double>>& grad_w,
    std::vector<std::vector<double>>& grad_b) const {
  const std::size_t n_layers = weights_.size();
  // Forward pass keeping pre-activations.
  std::vector<std::vector<double>> acts(n_layers + 1);
  acts[0].assign(input.begin(), input.end());
  std::vector<std::vector<double>> zs(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in_dim = dims_[l];
    const int out_dim = dims_[l + 1];
    zs[l].assign(out_dim, 0.0);
    acts[l + 1].assign(out_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) {
      double z = biases_[l][o];
      const double* row = &weights_[l][static_cast<std::size_t>(o) * in_dim];
      for (int i = 0; i < in_dim; ++i) z += row[i] * acts[l][i];
      zs[l][o] = z;
      acts[l + 1][o] = (l + 1 < n_layers) ? std::max(0.0, z) : z;
    }
  }
  const double pred = acts[n_layers][0];
  const double err = pred - target;
  const double sample_loss = weight * err * err * inv_batch;

  // Backward pass on the weighted squared error.
  std::vector<double> delta{2.0 * weight * err * inv_batch};
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in_dim = dims_[l];
    const int out_dim = dims_[l + 1];
    std::vector<double> prev_delta(in_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) {
      const double d = delta[o];
      grad_b[l][o] += d;
      double* gw = &grad_w[l][static_cast<std::size_t>(o) * in_dim];
      const double* row = &weights_[l][static_cast<std::size_t>(o) * in_dim];
      for (int i = 0; i < in_dim; ++i) {
        gw[i] += d * acts[l][i];
        prev_delta[i] += d * row[i];
      }
    }
    if (l > 0) {
      for (int i = 0; i < in_dim; ++i) {
        if (zs[l - 1][i] <= 0) prev_delta[i] = 0.0;
      }
    }
    delta.swap(prev_delta);
  }
  return sample_loss;
}

double Mlp::loss(const std::vector<std::vector<double>>& inputs,
                 const std::vector<double>& targets,
                 const std::vector<double>& weights) const {
  if (inputs.empty() || inputs.size() != targets.size() ||
      inputs.size() != weights.size()) {
    throw std::logic_error("batch arrays must be non-empty and equal-sized");
  }
  double total = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double err = predict(inputs[i]) - targets[i];
    total += weights[i] * err * err;
  }
  return total / static_cast<double>(inputs.size());
}

std::vector<double> Mlp::gradient(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<double>& targets,
    const std::vector<double>& weights) const {
  if (inputs.empty() || inputs.size() != targets.size() ||
      inputs.size() != weights.size()) {
    throw std::logic_error("batch arrays must be non-empty and equal-sized");
  }
  std::vector<std::vector<double>> grad_w, grad_b;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    grad_w.emplace_back(weights_[l].size(), 0.0);
    grad_b.emplace_back(biases_[l].size(), 0.0);
  }
  const double inv_batch = 1.0 / static_cast<double>(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    accumulate_gradient(inputs[i], targets[i], weights[i], inv_batch, grad_w,
                        grad_b);
  }
  std::vector<double> flat;
  flat.reserve(n_params());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.insert(flat.end(), grad_w[l].begin(), grad_w[l].end());
    flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
  }
  return flat;
}

double Mlp::train_batch(const std::vector<std::vector<double>>& inputs,
                        const std::vector<double>& targets,
                        const std::vector<double>& weights,
                        double learning_rate) {
  for (double t : targets) {
    if (!std::isfinite(t)) {
      throw std::logic_error("non-finite training target");
    }
  }
  const double pre_loss = loss(inputs, targets, weights);
  const auto grad = gradient(inputs, targets, weights);

  ++adam_t_;
  const double bias1 = 1.0 - std::pow(kAdamBeta1, adam_t_);
  const double bias2 = 1.0 - std::pow(kAdamBeta2, adam_t_);
  std::size_t k = 0;
  auto update = [&](double& param) {
    const double g = grad[k];
    adam_m_[k] = kAdamBeta1 * adam_m_[k] + (1.0 - kAdamBeta1) * g;
    adam_v_[k] = kAdamBeta2 * adam_v_[k] + (1.0 - kAdamBeta2) * g * g;
    const double m_hat = adam_m_[k] / bias1;
    const double v_hat = adam_v_[k] / bias2;
    param -= learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
    ++k;
  };
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (auto& w : weights_[l]) update(w);
    for (auto& b : biases_[l]) update(b);
  }
  return pre_loss;
}

std::vector<double> Mlp::params() const {
  std::vector<double> flat;
  flat.reserve(n_params());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.insert(flat.end(), weights_[l].begin(), weights_[l].end());
    flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
  }
  return flat;
}

void Mlp::set_params(std::span<const double> flat) {
  if (flat.size() != n_params()) {
    throw std::logic_error("parameter count mismatch");
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (auto& w : weights_[l]) w = flat[k++];
    for (auto& b : biases_[l]) b = flat[k++];
  }
}

std::size_t Mlp::n_params() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    total += weights_[l].size() + biases_[l].size();
  }
  return total;
}

namespace {

void write_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  out << buf;
}

}  // namespace

void Mlp::save(std::ostream& out, const std::string& arch_id) const {
  out << "qroute-model v1\n" << arch_id << "\n";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    out << (i ? " " : "") << dims_[i];
  }
  out << "\n";
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const int in_dim = dims_[l];
    for (int o = 0; o < dims_[l + 1]; ++o) {
      for (int i = 0; i < in_dim; ++i) {
        if (i) out << " ";
        write_value(out, weights_[l][static_cast<std::size_t>(o) * in_dim + i]);
      }
      out << "\n";
    }
    for (int o = 0; o < dims_[l + 1]; ++o) {
      if (o) out << " ";
      write_value(out, biases_[l][o]);
    }
    out << "\n";
  }
}

void Mlp::save_file(const std::string& path, const std::string& arch_id) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model: " + path);
  save(out, arch_id);
}

std::pair<Mlp, std::string> Mlp::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "qroute-model v1") {
    throw std::runtime_error("not a qroute-model v1 file");
  }
  std::string arch_id;
  if (!std::getline(in, arch_id)) {
    throw std::runtime_error("model file truncated: missing architecture id");
  }
  std::string dims_line;
  if (!std::getline(in, dims_line)) {
    throw std::runtime_error("model file truncated: missing dims");
  }
  std::istringstream dims_ss(dims_line);
  std::vector<int> dims;
  for (int d; dims_ss >> d;) dims.push_back(d);
  Mlp model(dims);
  for (std::size_t l = 0; l < model.weights_.size(); ++l) {
    for (auto& w : model.weights_[l]) {
      if (!(in >> w)) throw std::runtime_error("model file truncated");
    }
    for (auto& b : model.biases_[l]) {
      if (!(in >> b)) throw std::runtime_error("model file truncated");
    }
  }
  return {std::move(model), arch_id};
}

std::pair<Mlp, std::string> Mlp::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  try {
    return load(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha,
                           double priority_epsilon)
    : capacity_(capacity), alpha_(alpha), priority_epsilon_(priority_epsilon) {
  if (capacity < 1) throw std::invalid_argument("buffer needs capacity");
  if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
  if (priority_epsilon <= 0) {
    throw std::invalid_argument("priority epsilon must be positive");
  }
  tree_base_ = 1;
  while (tree_base_ < capacity_) tree_base_ <<= 1;
  tree_.assign(2 * tree_base_, 0.0);
  storage_.reserve(capacity_);
  priorities_.assign(capacity_, 0.0);
}

void ReplayBuffer::set_leaf(std::size_t id, double priority) {
  priorities_[id] = priority;
  std::size_t node = tree_base_ + id;
  tree_[node] = std::pow(priority, alpha_);
  for (node >>= 1; node >= 1; node >>= 1) {
    tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
    if (node == 1) break;
  }
}

void ReplayBuffer::add(Experience exp) {
  const std::size_t id = next_;
  if (storage_.size() < capacity_ && id == storage_.size()) {
    storage_.push_back(std::move(exp));
  } else {
    storage_[id] = std::move(exp);
  }
  set_leaf(id, max_priority_);
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t k, double beta,
                                         Rng& rng) {
  if (size_ == 0) throw std::logic_error("sampling from an empty buffer");
  const double total = tree_[1];
  Batch batch;
  batch.ids.reserve(k);
  batch.weights.reserve(k);
  double max_weight = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double r = rng.uniform01() * total;
    std::size_t node = 1;
    double remaining = r;
    while (node < tree_base_) {
      const double left = tree_[2 * node];
      if (remaining < left) {
        node = 2 * node;
      } else {
        remaining -= left;
        node = 2 * node + 1;
      }
    }
    std::size_t id = node - tree_base_;
    if (id >= size_) id = size_ - 1;  // numerical edge of the prefix walk
    const double prob = tree_[tree_base_ + id] / total;
    const double weight =
        std::pow(static_cast<double>(size_) * prob, -beta);
    batch.ids.push_back(id);
    batch.weights.push_back(weight);
    max_weight = std::max(max_weight, weight);
  }
  if (max_weight > 0) {
    for (auto& w : batch.weights) w /= max_weight;
  }
  return batch;
}

void ReplayBuffer::update_priorities(const std::vector<std::size_t>& ids,
                                     const std::vector<double>& td_errors) {
  if (ids.size() != td_errors.size()) {
    throw std::logic_error("ids and td errors must pair up");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double p = std::abs(td_errors[i]) + priority_epsilon_;
    set_leaf(ids[i], p);
    max_priority_ = std::max(max_priority_, p);
  }
}

}  // namespace qroute
