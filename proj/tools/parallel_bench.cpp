// Compares the serial reference implementations against the OpenMP kernels:
// all-pairs distances, replay TD-target batches and benchmark routing.

#include <chrono>
#include <cstdio>
#include <memory>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qroute/bench.hpp"

using namespace qroute;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3fs   openmp %8.3fs   speedup %.2fx\n", name,
              serial, parallel, parallel > 0 ? serial / parallel : 0.0);
}

void bench_distances() {
  const auto arch = Architecture::grid(60, 60);
  const int n = arch.n_nodes();
  const auto& edges = arch.edges();

  auto start = std::chrono::steady_clock::now();
  auto serial = all_pairs_distances_serial(n, edges);
  const double t_serial = seconds_since(start);

  start = std::chrono::steady_clock::now();
  auto parallel = all_pairs_distances(n, edges);
  const double t_parallel = seconds_since(start);

  if (serial != parallel) {
    std::printf("distances: MISMATCH between serial and parallel results\n");
  }
  report("all_pairs_distances", t_serial, t_parallel);
}

void bench_td_targets() {
  auto arch = std::make_shared<const Architecture>(Architecture::grid(4, 4));
  Rng rng(7);
  const auto circuit = gen_random_circuit(16, 50, rng);

  // Collect experiences by driving random episodes.
  std::vector<Experience> pool;
  RewardConfig rewards;
  while (pool.size() < 512) {
    RoutingState state =
        reset(circuit, arch, random_placement(*arch, 16, rng));
    int steps = 0;
    while (!state.done() && steps < 200 && pool.size() < 512) {
      auto eligible = eligible_edges(state);
      std::vector<Edge> action;
      if (!eligible.empty() && rng.bernoulli(0.7)) {
        action.push_back(eligible[rng.uniform_below(eligible.size())]);
      }
      auto outcome = step(state, action, rewards);
      pool.push_back({state, outcome.next, outcome.reward, outcome.done});
      state = std::move(outcome.next);
      ++steps;
    }
  }

  Rng init(3);
  const Mlp model({2 * feature_length(*arch), 32, 32, 1}, init);
  AnnealSchedule schedule;
  schedule.max_iters = 10;
  std::vector<const Experience*> batch;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    batch.push_back(&pool[i]);
    seeds.push_back(mix_seed(i));
  }

  const int repeats = 20;
  auto start = std::chrono::steady_clock::now();
  std::vector<double> serial;
  for (int r = 0; r < repeats; ++r) {
    serial = td_targets_serial(batch, model, 0.95, schedule, rewards, seeds);
  }
  const double t_serial = seconds_since(start);

  start = std::chrono::steady_clock::now();
  std::vector<double> parallel;
  for (int r = 0; r < repeats; ++r) {
    parallel = td_targets(batch, model, 0.95, schedule, rewards, seeds, 0);
  }
  const double t_parallel = seconds_since(start);

  if (serial != parallel) {
    std::printf("td_targets: MISMATCH between serial and parallel results\n");
  }
  report("replay td_targets", t_serial, t_parallel);
}

void bench_routing() {
  ConfigMap raw = ConfigMap::parse(
      "arch = grid:4x4\n"
      "family = random\n"
      "gates = 50\n"
      "batches = 2\n"
      "circuits_per_batch = 50\n"
      "routers = greedy,random_policy\n"
      "seed = 11\n");
  BenchConfig config = BenchConfig::from(raw);
  raw.finish();

  auto start = std::chrono::steady_clock::now();
  const auto serial = run_benchmark_serial(config);
  const double t_serial = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const auto parallel = run_benchmark(config);
  const double t_parallel = seconds_since(start);

  if (serial.to_csv() != parallel.to_csv()) {
    std::printf("benchmark: MISMATCH between serial and parallel results\n");
  }
  report("benchmark routing", t_serial, t_parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp\n");
#endif
  bench_distances();
  bench_td_targets();
  bench_routing();
  return 0;
}
