// qroute: train, run and benchmark the swap-insertion routing engine.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "qroute/bench.hpp"

namespace {

using namespace qroute;

Placement placement_from_arg(const std::string& arg, const Architecture& arch,
                             int n_qubits) {
  if (arg.rfind("random:", 0) == 0) {
    Rng rng(mix_seed(std::stoull(arg.substr(7))));
    return random_placement(arch, n_qubits, rng);
  }
  return load_placement(arg);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int cmd_gen(const std::string& family, int qubits, int layers, double density,
            int gates, std::uint64_t seed, const std::string& out_path) {
  Rng rng(mix_seed(seed));
  LogicalCircuit circuit;
  if (family == "single_full") {
    circuit = gen_single_full_layer(qubits, rng);
  } else if (family == "multi") {
    circuit = gen_multi_layer(qubits, layers, density, rng);
  } else if (family == "random") {
    circuit = gen_random_circuit(qubits, gates, rng);
  } else {
    throw std::invalid_argument("unknown family: " + family);
  }
  write_file(out_path, to_gatelist(circuit));
  std::cerr << "wrote " << circuit.n_gates() << " gates (depth "
            << circuit_depth(circuit) << ") to " << out_path << "\n";
  return 0;
}

int cmd_train(const std::string& arch_spec, const std::string& config_path,
              const std::string& out_path, int episodes_override,
              std::int64_t seed_override, const std::string& log_path) {
  ConfigMap config = config_path.empty() ? ConfigMap{}
                                         : ConfigMap::load_file(config_path);
  const auto seed = seed_override >= 0
                        ? static_cast<std::uint64_t>(seed_override)
                        : config.get_size("seed", 1);
  config.consume("seed");
  const int train_gates = config.get_int("train_gates", 50);
  const std::string train_family = config.get_string("train_family", "random");
  const int train_layers = config.get_int("train_layers", 2);
  const double train_density = config.get_double("train_density", 1.0);
  const int circuits_per_qubit = config.get_int("circuits_per_qubit", 10);
  AgentConfig agent = agent_config_from(config);
  if (episodes_override >= 0) agent.episodes = episodes_override;
  config.finish();

  auto arch = std::make_shared<const Architecture>(
      Architecture::from_spec(arch_spec));
  Rng rng(mix_seed(seed));
  std::vector<LogicalCircuit> training;
  const int n_training = circuits_per_qubit * arch->n_nodes();
  for (int i = 0; i < n_training; ++i) {
    if (train_family == "random") {
      training.push_back(
          gen_random_circuit(arch->n_nodes(), train_gates, rng));
    } else if (train_family == "multi") {
      training.push_back(gen_multi_layer(arch->n_nodes(), train_layers,
                                         train_density, rng));
    } else if (train_family == "single_full") {
      training.push_back(gen_single_full_layer(arch->n_nodes(), rng));
    } else {
      throw std::invalid_argument("unknown train_family: " + train_family);
    }
  }

  auto result = train(arch, training, agent, rng);
  result.model.save_file(out_path, arch->id());
  if (!log_path.empty()) write_file(log_path, training_log_csv(result.log));

  int completed = 0;
  double mean_return = 0;
  for (const auto& row : result.log) {
    completed += row.completed ? 1 : 0;
    mean_return += row.episode_return;
  }
  if (!result.log.empty()) mean_return /= result.log.size();
  std::cerr << "trained " << result.log.size() << " episodes (" << completed
            << " completed), mean return " << mean_return << "; model saved "
            "to " << out_path << "\n";
  return 0;
}

int cmd_route(const std::string& arch_spec, const std::string& model_path,
              const std::string& circuit_path, const std::string& placement_arg,
              const std::string& out_path, bool decompose,
              std::uint64_t seed) {
  auto arch = std::make_shared<const Architecture>(
      Architecture::from_spec(arch_spec));
  const auto circuit = load_circuit(circuit_path);
  auto [model, model_arch] = Mlp::load_file(model_path);
  const auto placement =
      placement_from_arg(placement_arg, *arch, circuit.n_qubits());

  AgentConfig agent;
  Rng rng(mix_seed(seed));
  RoutedCircuit routed = route(circuit, arch, placement, model, agent, rng);
  const auto violations = validate_routed(circuit, routed, *arch);
  if (!violations.empty()) {
    throw std::runtime_error("internal error: output failed validation: " +
                             violations.front().message);
  }
  const int swaps = routed.swap_count();
  if (decompose) routed = decompose_swaps(routed);
  write_file(out_path, dump_ops(routed));

  if (circuit.n_gates() > 0) {
    const auto metrics =
        cdo_cdr(circuit_depth(circuit), routed_depth(routed));
    std::cerr << "depth " << metrics.original_depth << " -> "
              << metrics.routed_depth << " (CDO " << metrics.cdo << ", CDR "
              << metrics.cdr_num << "/" << metrics.cdr_den << "), " << swaps
              << " swaps\n";
  }
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_path) {
  ConfigMap raw = ConfigMap::load_file(config_path);
  BenchConfig config = BenchConfig::from(raw);
  raw.finish();
  const auto report = run_benchmark(config);
  write_file(out_path, report.to_csv());
  std::cerr << report.summary();
  std::cerr << "wrote " << report.rows.size() << " rows to " << out_path
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_dir) {
  std::ifstream in(grid_path);
  if (!in) throw std::runtime_error("cannot open grid: " + grid_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto result = sweep(buffer.str(), out_dir);
  std::cerr << result.manifest_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qubit routing with pair-quality deep Q-learning"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a benchmark circuit");
  std::string gen_family = "random";
  int gen_qubits = 16, gen_layers = 1, gen_gates = 50;
  double gen_density = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--family", gen_family,
                  "single_full | multi | random")->capture_default_str();
  gen->add_option("--qubits", gen_qubits)->capture_default_str();
  gen->add_option("--layers", gen_layers)->capture_default_str();
  gen->add_option("--density", gen_density)->capture_default_str();
  gen->add_option("--gates", gen_gates)->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out)->required();

  auto* train = app.add_subcommand("train", "train a routing model");
  std::string train_arch, train_config, train_out, train_log;
  int train_episodes = -1;
  std::int64_t train_seed = -1;
  train->add_option("--arch", train_arch, "grid:MxN | tokyo | rueschlikon | "
                    "acorn | edgelist:FILE")->required();
  train->add_option("--config", train_config, "key=value config file");
  train->add_option("--out", train_out)->required();
  train->add_option("--episodes", train_episodes,
                    "override the configured episode count");
  train->add_option("--seed", train_seed, "override the configured seed");
  train->add_option("--log", train_log, "write the training log CSV here");

  auto* route_cmd = app.add_subcommand("route", "route one circuit");
  std::string route_arch, route_model, route_circuit, route_placement,
      route_out;
  bool route_decompose = false;
  std::uint64_t route_seed = 0;
  route_cmd->add_option("--arch", route_arch)->required();
  route_cmd->add_option("--model", route_model)->required();
  route_cmd->add_option("--circuit", route_circuit)->required();
  route_cmd->add_option("--placement", route_placement,
                        "random:SEED or a placement file")->required();
  route_cmd->add_option("--out", route_out)->required();
  route_cmd->add_flag("--decompose", route_decompose,
                      "decompose SWAPs into CNOT triples");
  route_cmd->add_option("--seed", route_seed,
                        "annealer seed")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "run a benchmark config");
  std::string bench_config, bench_out;
  bench->add_option("--config", bench_config)->required();
  bench->add_option("--out", bench_out)->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sweep");
  std::string sweep_grid, sweep_out;
  sweep_cmd->add_option("--grid", sweep_grid)->required();
  sweep_cmd->add_option("--out", sweep_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_family, gen_qubits, gen_layers, gen_density,
                     gen_gates, gen_seed, gen_out);
    }
    if (train->parsed()) {
      return cmd_train(train_arch, train_config, train_out, train_episodes,
                       train_seed, train_log);
    }
    if (route_cmd->parsed()) {
      return cmd_route(route_arch, route_model, route_circuit, route_placement,
                       route_out, route_decompose, route_seed);
    }
    if (bench->parsed()) return cmd_bench(bench_config, bench_out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_grid, sweep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
