#include "qroute/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qroute {

namespace {

std::vector<std::pair<int, int>> random_matching(int n_qubits, int n_gates,
                                                 Rng& rng) {
  std::vector<int> perm(n_qubits);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n_gates);
  for (int i = 0; i < n_gates; ++i) {
    const int a = perm[2 * i];
    const int b = perm[2 * i + 1];
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  return pairs;
}

}  // namespace

LogicalCircuit gen_single_full_layer(int n_qubits, Rng& rng) {
  if (n_qubits < 2) {
    throw std::invalid_argument("a full layer needs at least 2 qubits");
  }
  return LogicalCircuit(n_qubits, random_matching(n_qubits, n_qubits / 2, rng));
}

LogicalCircuit gen_multi_layer(int n_qubits, int n_layers, double density,
                               Rng& rng) {
  if (n_qubits < 2) {
    throw std::invalid_argument("multi-layer circuits need >= 2 qubits");
  }
  if (n_layers < 1) throw std::invalid_argument("need at least one layer");
  if (density <= 0 || density > 1) {
    throw std::invalid_argument("density must lie in (0,1]");
  }
  const int per_layer =
      static_cast<int>(std::floor(density * (n_qubits / 2) + 0.5));
  if (per_layer < 1) {
    throw std::invalid_argument("density yields zero gates per layer");
  }
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(per_layer) * n_layers);
  for (int layer = 0; layer < n_layers; ++layer) {
    const auto matching = random_matching(n_qubits, per_layer, rng);
    pairs.insert(pairs.end(), matching.begin(), matching.end());
  }
  return LogicalCircuit(n_qubits, pairs);
}

LogicalCircuit gen_random_circuit(int n_qubits, int n_gates, Rng& rng) {
  if (n_qubits < 2) throw std::invalid_argument("need >= 2 qubits");
  if (n_gates < 1) throw std::invalid_argument("need >= 1 gates");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n_gates);
  std::pair<int, int> previous{-1, -1};
  // With only two qubits every gate is (0,1), so the consecutive-duplicate
  // rejection below would never terminate; duplicates are unavoidable there.
  const bool reject_duplicates = n_qubits > 2;
  while (static_cast<int>(pairs.size()) < n_gates) {
    const int a = rng.uniform_int(0, n_qubits - 1);
    int b = rng.uniform_int(0, n_qubits - 2);
    if (b >= a) ++b;
    const std::pair<int, int> gate{std::min(a, b), std::max(a, b)};
    if (reject_duplicates && gate == previous) continue;  // resample
    pairs.push_back(gate);
    previous = gate;
  }
  return LogicalCircuit(n_qubits, pairs);
}

LayerBound layer_lower_bound(const Architecture& arch, double density,
                             int n_samples, Rng& rng) {
  if (density <= 0 || density > 1) {
    throw std::invalid_argument("density must lie in (0,1]");
  }
  if (n_samples < 1) throw std::invalid_argument("need samples");
  const int n = arch.n_nodes();
  const int per_layer = static_cast<int>(std::floor(density * (n / 2) + 0.5));
  double total = 0;
  for (int s = 0; s < n_samples; ++s) {
    const auto gates = random_matching(n, per_layer, rng);
    const auto placement = random_placement(arch, n, rng);
    int furthest = 0;
    for (const auto& [q0, q1] : gates) {
      furthest = std::max(
          furthest, arch.dist(placement.node_of(q0), placement.node_of(q1)));
    }
    total += furthest;
  }
  LayerBound bound;
  bound.mean_max_distance = total / n_samples;
  bound.cdr_floor = 1.0 + 0.5 * bound.mean_max_distance;
  return bound;
}

std::string RouterSpec::name() const {
  switch (kind) {
    case RouterKind::Dqn:
      return "dqn";
    case RouterKind::Greedy:
      return "greedy";
    case RouterKind::RandomPolicy:
      return "random_policy";
  }
  return "?";
}

namespace {

CircuitFamily family_from(const std::string& name) {
  if (name == "single_full") return CircuitFamily::SingleFull;
  if (name == "multi" || name == "multi_layer") return CircuitFamily::MultiLayer;
  if (name == "random") return CircuitFamily::Random;
  if (name == "files") return CircuitFamily::Files;
  throw std::invalid_argument("unknown circuit family: " + name);
}

std::string family_name(CircuitFamily family) {
  switch (family) {
    case CircuitFamily::SingleFull:
      return "single_full";
    case CircuitFamily::MultiLayer:
      return "multi";
    case CircuitFamily::Random:
      return "random";
    case CircuitFamily::Files:
      return "files";
  }
  return "?";
}

std::vector<RouterSpec> routers_from(const std::string& list) {
  std::vector<RouterSpec> out;
  std::istringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "greedy") {
      out.push_back({RouterKind::Greedy, ""});
    } else if (item == "random_policy") {
      out.push_back({RouterKind::RandomPolicy, ""});
    } else if (item.rfind("dqn:", 0) == 0) {
      out.push_back({RouterKind::Dqn, item.substr(4)});
    } else {
      throw std::invalid_argument(
          "unknown router '" + item +
          "' (expected greedy, random_policy or dqn:MODEL)");
    }
  }
  if (out.empty()) throw std::invalid_argument("no routers configured");
  return out;
}

}  // namespace

BenchConfig BenchConfig::from(ConfigMap& config) {
  BenchConfig c;
  c.arch_spec = config.get_string("arch", c.arch_spec);
  c.family = family_from(config.get_string("family", "random"));
  c.n_qubits = config.get_int("qubits", c.n_qubits);
  c.n_gates = config.get_int("gates", c.n_gates);
  c.n_layers = config.get_int("layers", c.n_layers);
  c.density = config.get_double("density", c.density);
  c.files_dir = config.get_string("files_dir", c.files_dir);
  c.depth_filter = config.get_int("depth_filter", c.depth_filter);
  c.batches = config.get_int("batches", c.batches);
  c.circuits_per_batch =
      config.get_int("circuits_per_batch", c.circuits_per_batch);
  c.seed = config.get_size("seed", c.seed);
  c.routers = routers_from(config.get_string("routers", "greedy"));
  c.decompose = config.get_bool("decompose", c.decompose);
  c.wall_time = config.get_string("timing", "none") == "wall";
  c.threads = config.get_int("threads", c.threads);
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
  c.gamma = config.get_double("gamma", c.gamma);
  c.step_cap_factor = config.get_int("step_cap_factor", c.step_cap_factor);
  if (c.batches < 1 || c.circuits_per_batch < 1) {
    throw std::invalid_argument("batches and circuits_per_batch must be >= 1");
  }
  return c;
}

namespace {

std::vector<LogicalCircuit> load_circuit_dir(const std::string& dir,
                                             int depth_filter) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<LogicalCircuit> circuits;
  for (const auto& path : paths) {
    auto circuit = load_circuit(path.string());
    if (circuit.n_gates() == 0) continue;
    if (circuit_depth(circuit) >= depth_filter) continue;
    circuits.push_back(std::move(circuit));
  }
  if (circuits.empty()) {
    throw std::invalid_argument("no usable circuits in " + dir);
  }
  return circuits;
}

struct BenchTask {
  LogicalCircuit circuit;
  Placement placement;
  int circuit_id;
  int batch;
  int orig_depth;
};

BenchRow route_one(const BenchTask& task, const RouterSpec& router,
                   const Mlp* model, const BenchConfig& config,
                   std::shared_ptr<const Architecture> arch,
                   std::uint64_t stream_seed) {
  BenchRow row;
  row.router = router.name();
  row.family = family_name(config.family);
  row.arch = arch->id();
  row.circuit_id = task.circuit_id;
  row.batch = task.batch;
  row.orig_depth = task.orig_depth;
  row.routed_depth = 0;
  row.cdo = 0;
  row.cdr = 0;
  row.swaps = 0;
  row.status = "ok";
  row.seconds = 0;

  const auto started = std::chrono::steady_clock::now();
  try {
    RoutedCircuit routed;
    Rng rng(stream_seed);
    switch (router.kind) {
      case RouterKind::Greedy:
        routed = greedy_route(task.circuit, arch, task.placement,
                              config.rewards, config.step_cap_factor);
        break;
      case RouterKind::RandomPolicy:
        routed = random_policy_route(task.circuit, arch, task.placement, rng,
                                     config.rewards, config.step_cap_factor);
        break;
      case RouterKind::Dqn: {
        AgentConfig agent;
        agent.acting = config.acting;
        agent.rewards = config.rewards;
        agent.gamma = config.gamma;
        agent.step_cap_factor = config.step_cap_factor;
        routed = route(task.circuit, arch, task.placement, *model, agent, rng);
        break;
      }
    }
    const auto violations = validate_routed(task.circuit, routed, *arch);
    if (!violations.empty()) {
      throw std::runtime_error("router bug: transcript failed validation: " +
                               violations.front().message);
    }
    row.swaps = routed.swap_count();
    if (config.decompose) routed = decompose_swaps(routed);
    row.routed_depth = routed_depth(routed);
    const auto metrics = cdo_cdr(task.orig_depth, row.routed_depth);
    row.cdo = metrics.cdo;
    row.cdr = metrics.cdr();
  } catch (const RoutingError&) {
    row.status = "step_cap";
  }
  if (config.wall_time) {
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  }
  return row;
}

BenchReport run_benchmark_impl(const BenchConfig& config, bool parallel) {
  auto arch = std::make_shared<const Architecture>(
      Architecture::from_spec(config.arch_spec));
  const int n_qubits =
      config.n_qubits > 0 ? config.n_qubits : arch->n_nodes();
  if (n_qubits > arch->n_nodes()) {
    throw std::invalid_argument("qubits exceed architecture nodes");
  }

  std::vector<LogicalCircuit> file_circuits;
  if (config.family == CircuitFamily::Files) {
    file_circuits = load_circuit_dir(config.files_dir, config.depth_filter);
  }

  // Circuits, placements and per-router streams all derive from the seed, so
  // the report is identical for any thread count.
  Rng master(mix_seed(config.seed));
  std::vector<BenchTask> tasks;
  const int total = config.batches * config.circuits_per_batch;
  tasks.reserve(total);
  for (int batch = 0; batch < config.batches; ++batch) {
    for (int i = 0; i < config.circuits_per_batch; ++i) {
      const int id = batch * config.circuits_per_batch + i;
      Rng gen = master.derive(static_cast<std::uint64_t>(id));
      BenchTask task;
      switch (config.family) {
        case CircuitFamily::SingleFull:
          task.circuit = gen_single_full_layer(n_qubits, gen);
          break;
        case CircuitFamily::MultiLayer:
          task.circuit = gen_multi_layer(n_qubits, config.n_layers,
                                         config.density, gen);
          break;
        case CircuitFamily::Random:
          task.circuit = gen_random_circuit(n_qubits, config.n_gates, gen);
          break;
        case CircuitFamily::Files:
          task.circuit = file_circuits[id % file_circuits.size()];
          break;
      }
      task.placement = random_placement(*arch, task.circuit.n_qubits(), gen);
      task.circuit_id = id;
      task.batch = batch;
      task.orig_depth = circuit_depth(task.circuit);
      tasks.push_back(std::move(task));
    }
  }

  BenchReport report;
  report.rows.resize(tasks.size() * config.routers.size());
  for (std::size_t r = 0; r < config.routers.size(); ++r) {
    const auto& router = config.routers[r];
    std::unique_ptr<Mlp> model;
    if (router.kind == RouterKind::Dqn) {
      auto [loaded, arch_id] = Mlp::load_file(router.model_path);
      if (loaded.input_dim() != 2 * feature_length(*arch)) {
        throw std::invalid_argument(
            "model " + router.model_path + " was trained for " + arch_id +
            " and does not fit " + arch->id());
      }
      model = std::make_unique<Mlp>(std::move(loaded));
    }
    std::vector<std::uint64_t> streams(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      streams[i] = mix_seed(config.seed ^ mix_seed((r << 32) ^ i));
    }
    const int n = static_cast<int>(tasks.size());
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(config.threads > 0 ? config.threads : omp_get_max_threads())
#endif
      for (int i = 0; i < n; ++i) {
        report.rows[r * tasks.size() + i] = route_one(
            tasks[i], router, model.get(), config, arch, streams[i]);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        report.rows[r * tasks.size() + i] = route_one(
            tasks[i], router, model.get(), config, arch, streams[i]);
      }
    }
  }

  // Rows are already grouped by router and ordered by circuit id; sort
  // explicitly anyway so the output order never depends on scheduling.
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const BenchRow& a, const BenchRow& b) {
                     if (a.router != b.router) return a.router < b.router;
                     return a.circuit_id < b.circuit_id;
                   });

  for (const auto& router : config.routers) {
    RouterAggregate agg;
    agg.router = router.name();
    std::vector<double> cdrs;
    std::vector<std::vector<double>> batch_cdrs(config.batches);
    double cdo_sum = 0;
    for (const auto& row : report.rows) {
      if (row.router != agg.router) continue;
      if (row.status != "ok") {
        ++agg.failed_rows;
        continue;
      }
      ++agg.ok_rows;
      cdrs.push_back(row.cdr);
      batch_cdrs[row.batch].push_back(row.cdr);
      cdo_sum += row.cdo;
    }
    if (!cdrs.empty()) {
      agg.mean_cdr = std::accumulate(cdrs.begin(), cdrs.end(), 0.0) /
                     static_cast<double>(cdrs.size());
      double var = 0;
      for (double v : cdrs) var += (v - agg.mean_cdr) * (v - agg.mean_cdr);
      agg.stddev_cdr = std::sqrt(var / static_cast<double>(cdrs.size()));
      agg.mean_cdo = cdo_sum / static_cast<double>(cdrs.size());
    }
    for (const auto& bc : batch_cdrs) {
      agg.batch_mean_cdr.push_back(
          bc.empty() ? 0.0
                     : std::accumulate(bc.begin(), bc.end(), 0.0) /
                           static_cast<double>(bc.size()));
    }
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config) {
  return run_benchmark_impl(config, true);
}

BenchReport run_benchmark_serial(const BenchConfig& config) {
  return run_benchmark_impl(config, false);
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "router,family,arch,circuit_id,batch,orig_depth,routed_depth,cdo,"
         "cdr,swaps,status,seconds\n";
  char buf[64];
  for (const auto& row : rows) {
    out << row.router << "," << row.family << "," << row.arch << ","
        << row.circuit_id << "," << row.batch << "," << row.orig_depth << ","
        << row.routed_depth << "," << row.cdo << ",";
    std::snprintf(buf, sizeof buf, "%.6f", row.cdr);
    out << buf << "," << row.swaps << "," << row.status << ",";
    std::snprintf(buf, sizeof buf, "%.3f", row.seconds);
    out << buf << "\n";
  }
  return out.str();
}

std::string BenchReport::summary() const {
  std::ostringstream out;
  char buf[160];
  for (const auto& agg : aggregates) {
    std::snprintf(buf, sizeof buf,
                  "%-14s ok=%-5d failed=%-4d mean_cdr=%.4f stddev=%.4f "
                  "mean_cdo=%.3f\n",
                  agg.router.c_str(), agg.ok_rows, agg.failed_rows,
                  agg.mean_cdr, agg.stddev_cdr, agg.mean_cdo);
    out << buf;
    for (std::size_t b = 0; b < agg.batch_mean_cdr.size(); ++b) {
      std::snprintf(buf, sizeof buf, "  batch %zu mean_cdr=%.4f\n", b,
                    agg.batch_mean_cdr[b]);
      out << buf;
    }
  }
  return out.str();
}

namespace {

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

}  // namespace

std::string SweepResult::manifest_csv() const {
  std::ostringstream out;
  out << "config_id,rank,status,seed,mean_cdr,model,params\n";
  char buf[64];
  for (const auto& e : entries) {
    out << e.config_id << "," << e.rank << "," << e.status << "," << e.seed
        << ",";
    std::snprintf(buf, sizeof buf, "%.6f", e.mean_cdr);
    out << buf << "," << e.model_path << "," << e.params << "\n";
  }
  return out.str();
}

SweepResult sweep(const std::string& grid_text, const std::string& out_dir) {
  // The grid file is a train config whose values may list alternatives
  // separated by '|'; the sweep runs the cartesian product.
  ConfigMap raw = ConfigMap::parse(grid_text);
  std::vector<GridAxis> axes;
  std::map<std::string, std::string> fixed;
  for (const auto& [key, value] : raw.entries()) {
    if (value.find('|') == std::string::npos) {
      fixed[key] = value;
      continue;
    }
    GridAxis axis{key, {}};
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, '|')) {
      while (!item.empty() && item.front() == ' ') item.erase(item.begin());
      while (!item.empty() && item.back() == ' ') item.pop_back();
      if (!item.empty()) axis.values.push_back(item);
    }
    if (axis.values.empty()) {
      throw std::invalid_argument("sweep key '" + key + "' has no values");
    }
    axes.push_back(std::move(axis));
  }

  std::size_t n_configs = 1;
  for (const auto& axis : axes) n_configs *= axis.values.size();

  std::filesystem::create_directories(out_dir);
  SweepResult result;

  for (std::size_t id = 0; id < n_configs; ++id) {
    std::map<std::string, std::string> entries = fixed;
    std::string params;
    std::size_t rest = id;
    for (const auto& axis : axes) {
      const auto& value = axis.values[rest % axis.values.size()];
      rest /= axis.values.size();
      entries[axis.key] = value;
      if (!params.empty()) params += ";";
      params += axis.key + "=" + value;
    }

    std::string text;
    for (const auto& [key, value] : entries) text += key + "=" + value + "\n";

    SweepEntry entry;
    entry.config_id = static_cast<int>(id);
    entry.seed = 0;
    entry.params = params.empty() ? "-" : params;
    entry.status = "ok";

    try {
      ConfigMap config = ConfigMap::parse(text);
      const auto arch_spec = config.get_string("arch", "grid:4x4");
      const auto base_seed = config.get_size("seed", 1);
      const int train_gates = config.get_int("train_gates", 50);
      const int circuits_per_qubit = config.get_int("circuits_per_qubit", 10);
      const int val_circuits = config.get_int("val_circuits", 100);
      const int val_gates = config.get_int("val_gates", train_gates);
      AgentConfig agent = agent_config_from(config);
      config.finish();
      entry.seed = mix_seed(base_seed + id);

      auto arch = std::make_shared<const Architecture>(
          Architecture::from_spec(arch_spec));
      Rng train_rng(entry.seed);
      std::vector<LogicalCircuit> training;
      const int n_training = circuits_per_qubit * arch->n_nodes();
      training.reserve(n_training);
      for (int i = 0; i < n_training; ++i) {
        training.push_back(
            gen_random_circuit(arch->n_nodes(), train_gates, train_rng));
      }
      auto trained = train(arch, training, agent, train_rng);

      // Shared validation set: derived from the base seed only, so every
      // config sees the same circuits and placements.
      Rng val_rng(mix_seed(base_seed ^ 0x76616cULL));
      std::vector<LogicalCircuit> circuits;
      std::vector<Placement> placements;
      for (int i = 0; i < val_circuits; ++i) {
        circuits.push_back(
            gen_random_circuit(arch->n_nodes(), val_gates, val_rng));
        placements.push_back(
            random_placement(*arch, arch->n_nodes(), val_rng));
      }
      Rng eval_rng(mix_seed(entry.seed ^ 0x6576616cULL));
      const auto evals = evaluate(trained.model, arch, circuits, placements,
                                  agent, eval_rng);
      double total = 0;
      for (const auto& e : evals) total += e.metrics.cdr();
      entry.mean_cdr = total / static_cast<double>(evals.size());

      char name[32];
      std::snprintf(name, sizeof name, "model_%03zu.txt", id);
      entry.model_path =
          (std::filesystem::path(out_dir) / name).string();
      trained.model.save_file(entry.model_path, arch->id());
    } catch (const std::exception&) {
      entry.status = "failed";
      entry.mean_cdr = std::numeric_limits<double>::infinity();
      entry.model_path = "";
    }
    result.entries.push_back(std::move(entry));
  }

  std::stable_sort(result.entries.begin(), result.entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     return a.mean_cdr < b.mean_cdr;
                   });
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    result.entries[i].rank = static_cast<int>(i) + 1;
  }
  std::ofstream manifest(std::filesystem::path(out_dir) / "manifest.csv");
  manifest << result.manifest_csv();
  return result;
}

}  // namespace qroute
