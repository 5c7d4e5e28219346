#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "qroute/bench.hpp"

using namespace qroute;

TEST_SUITE_BEGIN("bench");

TEST_CASE("single full layers") {
  Rng rng(1);
  const auto full16 = gen_single_full_layer(16, rng);
  CHECK(full16.n_gates() == 8);
  CHECK(circuit_depth(full16) == 1);

  const auto odd = gen_single_full_layer(5, rng);
  CHECK(odd.n_gates() == 2);

  const auto pair = gen_single_full_layer(2, rng);
  REQUIRE(pair.n_gates() == 1);
  CHECK(pair.gates()[0].q0 == 0);
  CHECK(pair.gates()[0].q1 == 1);

  CHECK_THROWS_AS(gen_single_full_layer(1, rng), std::invalid_argument);

  for (int seed = 0; seed < 25; ++seed) {
    Rng r(seed);
    CHECK(circuit_depth(gen_single_full_layer(9, r)) == 1);
  }
}

TEST_CASE("multi-layer circuits") {
  Rng rng(2);
  const auto dense = gen_multi_layer(20, 10, 1.0, rng);
  CHECK(dense.n_gates() == 100);
  CHECK(circuit_depth(dense) == 10);

  const auto single = gen_multi_layer(16, 1, 1.0, rng);
  CHECK(single.n_gates() == 8);
  CHECK(circuit_depth(single) == 1);

  const auto half = gen_multi_layer(20, 4, 0.5, rng);
  CHECK(half.n_gates() == 20);
  CHECK(circuit_depth(half) <= 4);

  CHECK_THROWS_AS(gen_multi_layer(4, 3, 0.1, rng), std::invalid_argument);

  // Full density forces depth == layers, odd qubit counts included.
  for (int seed = 0; seed < 20; ++seed) {
    Rng r(100 + seed);
    const int n = 5 + seed % 4;
    const int layers = 1 + seed % 5;
    CHECK(circuit_depth(gen_multi_layer(n, layers, 1.0, r)) == layers);
  }
}

TEST_CASE("random circuits") {
  Rng rng(3);
  const auto tiny = gen_random_circuit(4, 1, rng);
  REQUIRE(tiny.n_gates() == 1);
  CHECK(tiny.gates()[0].q0 < tiny.gates()[0].q1);

  // No consecutive duplicate pairs.
  const auto big = gen_random_circuit(5, 400, rng);
  for (int i = 1; i < big.n_gates(); ++i) {
    const auto& a = big.gates()[i - 1];
    const auto& b = big.gates()[i];
    CHECK((a.q0 != b.q0 || a.q1 != b.q1));
  }

  // Byte-identical output for a fixed seed.
  Rng r1(9), r2(9);
  CHECK(to_gatelist(gen_random_circuit(16, 100, r1)) ==
        to_gatelist(gen_random_circuit(16, 100, r2)));

  // 16-qubit, 1000-gate circuits sit in the documented density band.
  Rng r3(4);
  const auto dense = gen_random_circuit(16, 1000, r3);
  const double density =
      (1000.0 / circuit_depth(dense)) / (16 / 2);
  CHECK(density > 0.25);
  CHECK(density < 0.45);
}

TEST_CASE("layer-sequential lower bound") {
  // Complete graph: every pair adjacent, furthest distance is always 1.
  std::vector<Edge> k5;
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) k5.emplace_back(a, b);
  }
  const auto complete = Architecture::from_edges("k5", 5, k5);
  Rng rng(5);
  const auto trivial = layer_lower_bound(complete, 1.0, 200, rng);
  CHECK(trivial.mean_max_distance == doctest::Approx(1.0));
  CHECK(trivial.cdr_floor == doctest::Approx(1.5));

  // 4-node line at full density: enumerate all matchings x placements for
  // the exact expectation and compare the sampled estimate.
  const auto line = Architecture::from_edges("line4", 4,
                                             {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<std::vector<std::pair<int, int>>> matchings = {
      {{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  std::vector<int> perm{0, 1, 2, 3};
  double total = 0;
  int count = 0;
  std::sort(perm.begin(), perm.end());
  do {
    for (const auto& matching : matchings) {
      int furthest = 0;
      for (const auto& [a, b] : matching) {
        furthest = std::max(furthest, line.dist(perm[a], perm[b]));
      }
      total += furthest;
      ++count;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double exact_mean = total / count;

  Rng sampler(6);
  const auto sampled = layer_lower_bound(line, 1.0, 60000, sampler);
  CHECK(sampled.mean_max_distance ==
        doctest::Approx(exact_mean).epsilon(0.02));
  CHECK(sampled.cdr_floor ==
        doctest::Approx(1.0 + exact_mean / 2).epsilon(0.02));
}

TEST_CASE("benchmark runs are deterministic and complete") {
  ConfigMap raw = ConfigMap::parse(
      "arch = grid:3x3\n"
      "family = random\n"
      "gates = 8\n"
      "batches = 2\n"
      "circuits_per_batch = 5\n"
      "routers = greedy,random_policy\n"
      "seed = 42\n");
  const BenchConfig config = BenchConfig::from(raw);
  raw.finish();

  const auto report = run_benchmark(config);
  CHECK(report.rows.size() == 2 * 10);
  int greedy_rows = 0;
  for (const auto& row : report.rows) {
    if (row.router == "greedy") {
      ++greedy_rows;
      CHECK(row.status == "ok");
    }
    // The random policy may hit its step cap; such rows are recorded as
    // failures and skipped by the aggregates.
    if (row.status == "ok") {
      CHECK(row.cdo >= 0);
      CHECK(row.cdr >= 1.0);
    }
    CHECK(row.seconds == 0.0);  // timing defaults to none
  }
  CHECK(greedy_rows == 10);

  // Byte-identical CSV across runs and thread counts.
  const auto again = run_benchmark(config);
  CHECK(report.to_csv() == again.to_csv());
  const auto serial = run_benchmark_serial(config);
  CHECK(report.to_csv() == serial.to_csv());

  // Greedy beats the random policy on average.
  double greedy_cdr = 0, random_cdr = 0;
  for (const auto& agg : report.aggregates) {
    if (agg.router == "greedy") greedy_cdr = agg.mean_cdr;
    if (agg.router == "random_policy") random_cdr = agg.mean_cdr;
  }
  CHECK(greedy_cdr < random_cdr);
}

TEST_CASE("decomposition pass multiplies depth at most threefold") {
  ConfigMap raw = ConfigMap::parse(
      "arch = grid:2x2\n"
      "family = random\n"
      "gates = 5\n"
      "batches = 1\n"
      "circuits_per_batch = 6\n"
      "routers = greedy\n"
      "seed = 7\n");
  BenchConfig config = BenchConfig::from(raw);
  raw.finish();
  const auto plain = run_benchmark(config);
  config.decompose = true;
  const auto decomposed = run_benchmark(config);
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    CHECK(decomposed.rows[i].routed_depth >= plain.rows[i].routed_depth);
    CHECK(decomposed.rows[i].routed_depth <=
          3 * plain.rows[i].routed_depth);
  }
}

TEST_CASE("benchmark config rejects unknown keys") {
  ConfigMap raw = ConfigMap::parse("arch = grid:2x2\nbogus_key = 1\n");
  BenchConfig::from(raw);
  CHECK_THROWS_WITH_AS(raw.finish(), doctest::Contains("bogus_key"),
                       std::invalid_argument);
  CHECK_THROWS_AS(ConfigMap::parse("novalue\n"), std::invalid_argument);
  CHECK_THROWS_AS(ConfigMap::parse("a=1\na=2\n"), std::invalid_argument);
}

TEST_CASE("files family ingests a circuit directory") {
  namespace fs = std::filesystem;
  const auto dir = fs::path("test_bench_circuits_tmp");
  fs::create_directories(dir);
  {
    std::ofstream a(dir / "a.qasm");
    a << "qreg q[4];\ncx q[0],q[1];\ncx q[1],q[2];\n";
    std::ofstream b(dir / "b.txt");
    b << "qubits 4\n0 1\n2 3\n";
    std::ofstream deep(dir / "deep.txt");
    deep << "qubits 2\n";
    for (int i = 0; i < 250; ++i) deep << "0 1\n";
  }
  ConfigMap raw = ConfigMap::parse(
      "arch = grid:2x2\n"
      "family = files\n"
      "files_dir = " + (dir / "").string() + "\n"
      "batches = 1\n"
      "circuits_per_batch = 4\n"
      "routers = greedy\n"
      "seed = 3\n");
  const BenchConfig config = BenchConfig::from(raw);
  raw.finish();
  const auto report = run_benchmark(config);
  // The depth-250 file is filtered; the two usable circuits cycle.
  CHECK(report.rows.size() == 4);
  for (const auto& row : report.rows) CHECK(row.status == "ok");
  fs::remove_all(dir);
}

TEST_CASE("sweep trains, ranks and writes a manifest") {
  namespace fs = std::filesystem;
  const auto dir = std::string("test_sweep_tmp");
  // Four corners: one is invalid (floor above start) and must be recorded
  // as a failure without sinking the sweep.
  const std::string grid =
      "arch = grid:1x2\n"
      "episodes = 30\n"
      "epsilon_start = 0.9 | 1.0\n"
      "epsilon_decay = 0.9\n"
      "epsilon_min = 0.01 | 1.0\n"
      "batch_size = 8\n"
      "train_gates = 3\n"
      "circuits_per_qubit = 3\n"
      "val_circuits = 8\n"
      "val_gates = 3\n"
      "seed = 5\n";
  const auto result = sweep(grid, dir);
  CHECK(result.entries.size() == 4);
  CHECK(result.entries.front().rank == 1);
  int ok = 0, failed = 0;
  for (const auto& entry : result.entries) {
    if (entry.status == "ok") {
      ++ok;
      CHECK(fs::exists(entry.model_path));
    } else {
      ++failed;
      CHECK(entry.model_path.empty());
    }
  }
  CHECK(ok == 3);
  CHECK(failed == 1);
  // Ranked ascending by validation CDR, failures last.
  for (std::size_t i = 1; i < result.entries.size(); ++i) {
    CHECK(result.entries[i - 1].mean_cdr <= result.entries[i].mean_cdr);
  }
  CHECK(fs::exists(fs::path(dir) / "manifest.csv"));
  const auto manifest = result.manifest_csv();
  CHECK(manifest.find("config_id,rank,status,seed,mean_cdr") == 0);
  fs::remove_all(dir);
}

TEST_SUITE_END();
