#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "qroute/bench.hpp"
#include "qroute/router.hpp"

using namespace qroute;

TEST_SUITE_BEGIN("router");

namespace {

std::shared_ptr<const Architecture> line(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return std::make_shared<const Architecture>(
      Architecture::from_edges("line" + std::to_string(n), n, edges));
}

}  // namespace

TEST_CASE("greedy routes the hand-simulated cases") {
  auto arch = line(4);

  // Single gate at distance 2: one swap, then the gate; depth 2.
  const auto distant = LogicalCircuit(4, {{0, 2}});
  const auto routed = greedy_route(distant, arch, Placement::identity(4));
  CHECK(routed.swap_count() == 1);
  CHECK(routed_depth(routed) == 2);
  CHECK(validate_routed(distant, routed, *arch).empty());

  // Already adjacent: no swaps, depth 1.
  const auto adjacent = LogicalCircuit(4, {{2, 3}});
  const auto direct = greedy_route(adjacent, arch, Placement::identity(4));
  CHECK(direct.swap_count() == 0);
  CHECK(routed_depth(direct) == 1);

  // Empty circuit: empty output.
  const auto empty = greedy_route(LogicalCircuit(4, {}), arch,
                                  Placement::identity(4));
  CHECK(empty.ops.empty());
  CHECK(routed_depth(empty) == 0);
}

TEST_CASE("greedy routes a depth-6 circuit on the 2x2 grid") {
  auto arch = std::make_shared<const Architecture>(Architecture::grid(2, 2));
  Rng rng(26);
  const auto circuit = gen_multi_layer(4, 6, 1.0, rng);
  REQUIRE(circuit_depth(circuit) == 6);
  const auto placement = random_placement(*arch, 4, rng);
  const auto routed = greedy_route(circuit, arch, placement);
  CHECK(validate_routed(circuit, routed, *arch).empty());
  const auto metrics = cdo_cdr(6, routed_depth(routed));
  CHECK(metrics.cdo >= 0);
}

TEST_CASE("greedy is deterministic and always validates") {
  auto arch = std::make_shared<const Architecture>(Architecture::grid(4, 4));
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto circuit = gen_random_circuit(16, 20, rng);
    const auto placement = random_placement(*arch, 16, rng);
    const auto a = greedy_route(circuit, arch, placement);
    const auto b = greedy_route(circuit, arch, placement);
    CHECK(dump_ops(a) == dump_ops(b));
    CHECK(validate_routed(circuit, a, *arch).empty());
  }
}

TEST_CASE("random policy routes small instances") {
  auto arch = std::make_shared<const Architecture>(Architecture::grid(2, 2));
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto circuit = gen_random_circuit(4, 6, rng);
    const auto placement = random_placement(*arch, 4, rng);
    const auto routed =
        random_policy_route(circuit, arch, placement, rng);
    CHECK(validate_routed(circuit, routed, *arch).empty());
  }
}

TEST_CASE("exhaustive search solves the parallel-swap line instance") {
  auto arch = line(4);
  // Two gates: one adjacent at reset, the second two hops away; the swap on
  // the free edge runs beside the first CNOT, so depth 2 is attainable and
  // optimal.
  const auto circuit = LogicalCircuit(4, {{0, 1}, {1, 3}});
  const auto best =
      exhaustive_route(circuit, arch, Placement::identity(4), 8);
  REQUIRE(best.has_value());
  CHECK(*best == 2);
}

TEST_CASE("exhaustive search base cases") {
  auto arch = line(4);

  // Already routable circuits take exactly their own depth.
  const auto chain = LogicalCircuit(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(circuit_depth(chain) == 3);
  const auto steps =
      exhaustive_route(chain, arch, Placement::identity(4), 8);
  REQUIRE(steps.has_value());
  CHECK(*steps == 3);

  CHECK(*exhaustive_route(LogicalCircuit(4, {}), arch,
                          Placement::identity(4), 8) == 0);

  // One gate at distance d: both endpoints can walk inward in parallel, so
  // ceil((d-1)/2) swap layers suffice before the gate layer.
  for (int d = 1; d <= 3; ++d) {
    const auto gate = LogicalCircuit(4, {{0, d}});
    const auto depth =
        exhaustive_route(gate, arch, Placement::identity(4), 8);
    REQUIRE(depth.has_value());
    CHECK(*depth == 1 + (d - 1 + 1) / 2);
  }

  // Bound exceeded: no result.
  CHECK(!exhaustive_route(LogicalCircuit(4, {{0, 3}}), arch,
                          Placement::identity(4), 1)
             .has_value());

  // Tractability preconditions are enforced.
  auto big = std::make_shared<const Architecture>(Architecture::grid(2, 3));
  CHECK_THROWS_AS(exhaustive_route(LogicalCircuit(6, {{0, 1}}), big,
                                   Placement::identity(6), 4),
                  std::invalid_argument);
}

TEST_CASE("greedy depth is bounded below by the optimum") {
  auto arch = line(4);
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto circuit = gen_random_circuit(4, 5, rng);
    const auto placement = random_placement(*arch, 4, rng);
    const auto optimal = exhaustive_route(circuit, arch, placement, 8);
    REQUIRE(optimal.has_value());
    const auto greedy = greedy_route(circuit, arch, placement);
    CHECK(routed_depth(greedy) >= *optimal);
  }
}

TEST_CASE("model routing works and reports failures honestly") {
  auto arch = line(4);
  const auto circuit = LogicalCircuit(4, {{0, 2}});

  // A zero model still routes; the annealer maximizes immediate reward.
  Rng init(1);
  Mlp zero({2 * feature_length(*arch), 1}, init);
  zero.set_params(std::vector<double>(zero.n_params(), 0.0));
  AgentConfig config;
  Rng rng(6);
  const auto routed =
      route(circuit, arch, Placement::identity(4), zero, config, rng);
  CHECK(validate_routed(circuit, routed, *arch).empty());

  // Dimension mismatch is rejected up front.
  auto grid = std::make_shared<const Architecture>(Architecture::grid(3, 3));
  CHECK_THROWS_AS(route(circuit, grid, Placement::identity(9), zero, config,
                        rng),
                  std::invalid_argument);

  // A sabotage model that rewards pushing qubits apart stalls the episode;
  // the step cap turns that into a RoutingError with a partial transcript.
  Mlp sabotage({2 * feature_length(*arch), 1}, init);
  auto params = std::vector<double>(sabotage.n_params(), 0.0);
  const int flen = feature_length(*arch);
  params[flen + arch->diameter() - 1] = 1000.0;  // next-state d[diameter]
  sabotage.set_params(params);
  config.step_cap_factor = 1;
  Rng rng2(6);
  try {
    route(LogicalCircuit(4, {{0, 3}}), arch, Placement::identity(4), sabotage,
          config, rng2);
    FAIL("expected RoutingError");
  } catch (const RoutingError& e) {
    CHECK(e.partial_transcript.ops.empty());  // it never schedules the gate
  }
}

TEST_SUITE_END();
