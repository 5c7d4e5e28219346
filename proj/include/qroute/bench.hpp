#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qroute/config.hpp"
#include "qroute/router.hpp"

namespace qroute {

/// Single full layer: floor(n/2) disjoint gates from a uniformly random
/// matching. Depth is exactly 1.
LogicalCircuit gen_single_full_layer(int n_qubits, Rng& rng);

/// n_layers independent random matchings, each truncated to
/// round(density * floor(n/2)) gates (round half up).
LogicalCircuit gen_multi_layer(int n_qubits, int n_layers, double density,
                               Rng& rng);

/// Independent uniform distinct qubit pairs; consecutive duplicates are
/// resampled.
LogicalCircuit gen_random_circuit(int n_qubits, int n_gates, Rng& rng);

/// Layer-sequential CDR floor: over random (layer, placement) draws, the
/// mean over samples of the furthest gate distance, halved, bounds the swap
/// layers a layer-by-layer strategy needs per gate layer.
struct LayerBound {
  double mean_max_distance = 0;
  double cdr_floor = 1;  // 1 + mean_max_distance / 2
};

LayerBound layer_lower_bound(const Architecture& arch, double density,
                             int n_samples, Rng& rng);

enum class CircuitFamily { SingleFull, MultiLayer, Random, Files };
enum class RouterKind { Dqn, Greedy, RandomPolicy };

struct RouterSpec {
  RouterKind kind;
  std::string model_path;  // Dqn only

  std::string name() const;
};

/// Benchmark orchestration config; every field is a config-file key.
struct BenchConfig {
  std::string arch_spec = "grid:4x4";
  CircuitFamily family = CircuitFamily::Random;
  int n_qubits = 0;  // 0 = architecture node count
  int n_gates = 50;
  int n_layers = 1;
  double density = 1.0;
  std::string files_dir;
  int depth_filter = 200;  // Files family: skip circuits at least this deep
  int batches = 5;
  int circuits_per_batch = 100;
  std::uint64_t seed = 0;
  std::vector<RouterSpec> routers;
  bool decompose = false;
  bool wall_time = false;  // report wall-clock seconds instead of 0
  int threads = 0;
  AnnealSchedule acting;
  RewardConfig rewards;
  double gamma = 0.95;
  int step_cap_factor = 2;

  static BenchConfig from(ConfigMap& config);
};

struct BenchRow {
  std::string router;
  std::string family;
  std::string arch;
  int circuit_id;
  int batch;
  int orig_depth;
  int routed_depth;
  int cdo;
  double cdr;
  int swaps;
  std::string status;  // ok | step_cap
  double seconds;
};

struct RouterAggregate {
  std::string router;
  int ok_rows = 0;
  int failed_rows = 0;
  double mean_cdr = 0;
  double stddev_cdr = 0;
  double mean_cdo = 0;
  std::vector<double> batch_mean_cdr;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<RouterAggregate> aggregates;

  std::string to_csv() const;
  std::string summary() const;
};

/// Routes every generated circuit with every configured router and collects
/// per-circuit metrics. Circuits and placements derive deterministically
/// from the seed and are shared across routers; rows are sorted by
/// (router, circuit_id), so a fixed seed reproduces the CSV byte for byte.
/// Circuit routing is OpenMP-parallel with per-circuit streams.
BenchReport run_benchmark(const BenchConfig& config);

/// Serial reference for the benchmark loop; used by tests and the parallel
/// benchmark tool.
BenchReport run_benchmark_serial(const BenchConfig& config);

struct SweepEntry {
  int config_id;
  int rank = -1;
  std::string status;  // ok | failed
  std::uint64_t seed;
  double mean_cdr = 0;
  std::string params;      // "key=value" pairs joined with ';'
  std::string model_path;  // empty when training failed
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // ranked, best first

  std::string manifest_csv() const;
};

/// Trains one model per point of the hyperparameter grid (a train config
/// whose values may list alternatives separated by '|'), evaluates each on
/// a shared validation set and ranks by mean CDR. Individual training
/// failures are recorded and the sweep continues. Models and the manifest
/// are written to out_dir.
SweepResult sweep(const std::string& grid_text, const std::string& out_dir);

}  // namespace qroute
