#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "peerinfl/generators.hpp"
#include "peerinfl/simulator.hpp"

using namespace peerinfl;

namespace {

SimConfig config(double p0, double lambda_p, std::vector<ExternalSpike> spikes, int steps,
                 std::optional<NodeId> seed_node = NodeId{0}, std::uint64_t rng_seed = 1) {
  SimConfig cfg;
  cfg.peer = {p0, lambda_p};
  cfg.spikes = std::move(spikes);
  cfg.steps = steps;
  cfg.seed_node = seed_node;
  cfg.rng_seed = rng_seed;
  return cfg;
}

}  // namespace

TEST_CASE("simulate without any influence only activates the seed", "[simulator]") {
  auto net = generators::erdos_renyi(50, 0.1, 1);
  auto sim = simulate(net, config(0.0, 0.0, {}, 20, NodeId{7}));
  REQUIRE(sim.cascade.activated_count() == 1);
  REQUIRE(sim.seed == 7);
  REQUIRE(sim.cascade.time(7) == 0.0);
  REQUIRE(sim.label[7] == TruthLabel::seed);
}

TEST_CASE("a certain spike activates everything at its step", "[simulator]") {
  auto net = generators::erdos_renyi(50, 0.1, 1);
  auto sim = simulate(net, config(0.0, 0.0, {{1.0, 0.0, 1}}, 3));
  REQUIRE(sim.cascade.activated_count() == 50);
  for (NodeId i = 0; i < 50; ++i) {
    if (i == sim.seed) continue;
    REQUIRE(sim.cascade.time(i) == 1.0);
    REQUIRE(sim.label[i] == TruthLabel::external);
  }
}

TEST_CASE("K3 with certain peer influence activates at step 1", "[simulator]") {
  auto k3 = Network::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  auto sim = simulate(k3, config(1.0, 0.0, {}, 5));
  for (NodeId i = 1; i < 3; ++i) {
    REQUIRE(sim.cascade.time(i) == 1.0);
    REQUIRE(sim.label[i] == TruthLabel::peer);
  }
}

TEST_CASE("simulate is reproducible", "[simulator]") {
  auto net = generators::erdos_renyi(200, 0.03, 2);
  SimConfig cfg;
  cfg.rng_seed = 42;
  auto a = simulate(net, cfg);
  auto b = simulate(net, cfg);
  REQUIRE(a.seed == b.seed);
  REQUIRE(std::equal(a.cascade.times().begin(), a.cascade.times().end(), b.cascade.times().begin()));
  REQUIRE(a.label == b.label);
  REQUIRE(a.both_fired == b.both_fired);

  cfg.rng_seed = 43;
  auto c = simulate(net, cfg);
  REQUIRE_FALSE(std::equal(a.cascade.times().begin(), a.cascade.times().end(),
                           c.cascade.times().begin()));
}

TEST_CASE("labels follow the active mechanisms", "[simulator][property]") {
  auto net = generators::erdos_renyi(300, 0.02, 3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto peer_only = simulate(net, config(0.2, 0.05, {}, 20, std::nullopt, seed));
    auto ext_only = simulate(net, config(0.0, 0.0, {{0.1, 0.2, 2}}, 20, std::nullopt, seed));
    std::size_t seeds = 0;
    for (NodeId i = 0; i < 300; ++i) {
      REQUIRE(peer_only.label[i].has_value() == peer_only.cascade.activated(i));
      if (peer_only.label[i] == TruthLabel::seed) ++seeds;
      if (peer_only.label[i] && i != peer_only.seed) REQUIRE(peer_only.label[i] == TruthLabel::peer);
      if (ext_only.label[i] && i != ext_only.seed) REQUIRE(ext_only.label[i] == TruthLabel::external);
      Time t = peer_only.cascade.time(i);
      if (t != never) REQUIRE(t == std::floor(t));
    }
    REQUIRE(seeds == 1);
  }
}

TEST_CASE("peer influence needs a neighbor activated in an earlier step", "[simulator]") {
  // path 0-1-2 with certain transmission: one hop per step
  auto path = Network::from_edges(3, {{0, 1}, {1, 2}});
  auto sim = simulate(path, config(1.0, 0.0, {}, 5));
  REQUIRE(sim.cascade.time(1) == 1.0);
  REQUIRE(sim.cascade.time(2) == 2.0);
}

TEST_CASE("first-spike activations match q0 times the susceptible count", "[simulator]") {
  // 200 isolated-ish nodes; spike at step 1, lambda_e = 0
  auto net = generators::erdos_renyi(200, 0.0, 1);
  const double q0 = 0.15;
  const int runs = 100;
  double sum = 0, sum_sq = 0;
  for (int r = 0; r < runs; ++r) {
    auto sim = simulate(net, config(0.0, 0.0, {{q0, 0.0, 1}}, 1, NodeId{0}, 1000 + r));
    double k = static_cast<double>(sim.cascade.activated_count() - 1);
    sum += k;
    sum_sq += k * k;
  }
  double mean = sum / runs;
  double sd = std::sqrt((sum_sq - runs * mean * mean) / (runs - 1));
  REQUIRE(std::abs(mean - q0 * 199) <= 3 * sd / std::sqrt(runs));
}

TEST_CASE("both-fired events are flagged", "[simulator]") {
  auto net = generators::erdos_renyi(300, 0.05, 9);
  auto sim = simulate(net, config(0.5, 0.0, {{0.5, 0.0, 1}}, 5));
  std::size_t both = 0;
  for (NodeId i = 0; i < 300; ++i) {
    if (sim.both_fired[i]) {
      ++both;
      REQUIRE(sim.label[i] != TruthLabel::seed);
    }
  }
  REQUIRE(both > 0);
}

TEST_CASE("SimConfig validation and key=value parsing", "[simulator]") {
  auto net = generators::erdos_renyi(10, 0.3, 1);
  REQUIRE_THROWS_AS(simulate(net, config(0.1, 0.0, {}, 0)), InvalidArgument);
  REQUIRE_THROWS_AS(simulate(net, config(0.1, 0.0, {{1.5, 0, 1}}, 3)), InvalidArgument);
  REQUIRE_THROWS_AS(simulate(net, config(0.1, 0.0, {}, 3, NodeId{99})), InvalidArgument);

  std::istringstream in("# sim\np0 = 0.05\nlambda_p=0.1\nsteps=12\nseed=9\nspike=0.3,0.2,4\nspike=0.1,0,8\n");
  auto cfg = parse_sim_config(in);
  REQUIRE(cfg.peer.p0 == 0.05);
  REQUIRE(cfg.peer.lambda == 0.1);
  REQUIRE(cfg.steps == 12);
  REQUIRE(cfg.rng_seed == 9);
  REQUIRE(cfg.spikes.size() == 2);
  REQUIRE(cfg.spikes[1].t_fire == 8);

  std::istringstream bad("p0 0.1\n");
  REQUIRE_THROWS_AS(parse_sim_config(bad), ParseError);
  std::istringstream unknown("colour=blue\n");
  REQUIRE_THROWS_AS(parse_sim_config(unknown), ParseError);
}
