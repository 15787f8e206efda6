#include <catch_amalgamated.hpp>

#include <queue>
#include <random>
#include <sstream>

#include "peerinfl/generators.hpp"
#include "peerinfl/graph.hpp"

using namespace peerinfl;

namespace {

std::vector<EdgeRow> rows(std::initializer_list<std::pair<const char*, const char*>> list) {
  std::vector<EdgeRow> out;
  std::size_t line = 0;
  for (auto [a, b] : list) out.push_back({a, b, ++line});
  return out;
}

Network from_pairs(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> list) {
  std::vector<Edge> edges;
  for (auto [a, b] : list) edges.push_back(make_edge(a, b));
  return Network::from_edges(n, edges);
}

bool is_connected(const Network& net) {
  if (net.node_count() == 0) return true;
  std::vector<bool> seen(net.node_count(), false);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : net.neighbors(u))
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        q.push(v);
      }
  }
  return reached == net.node_count();
}

void require_simple_symmetric(const Network& net) {
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    auto nbrs = net.neighbors(static_cast<NodeId>(i));
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      REQUIRE(nbrs[k] != i);
      if (k > 0) REQUIRE(nbrs[k - 1] < nbrs[k]);
      REQUIRE(net.has_edge(nbrs[k], static_cast<NodeId>(i)));
    }
  }
}

}  // namespace

TEST_CASE("load_network drops duplicates and self-loops", "[graph]") {
  auto loaded = load_network(rows({{"a", "b"}, {"b", "c"}, {"a", "b"}}));
  REQUIRE(loaded.network.node_count() == 3);
  REQUIRE(loaded.network.edge_count() == 2);
  REQUIRE(loaded.report.duplicates_dropped == 1);

  auto loop = load_network(rows({{"a", "a"}}));
  REQUIRE(loop.network.node_count() == 1);
  REQUIRE(loop.network.edge_count() == 0);
  REQUIRE(loop.report.self_loops_dropped == 1);

  // reversed duplicate is still a duplicate
  auto rev = load_network(rows({{"x", "y"}, {"y", "x"}}));
  REQUIRE(rev.network.edge_count() == 1);
}

TEST_CASE("load_network remaps ids densely in order of appearance", "[graph]") {
  auto net = load_network(rows({{"u7", "u3"}, {"u3", "u9"}})).network;
  REQUIRE(net.original_id(0) == "u7");
  REQUIRE(net.original_id(1) == "u3");
  REQUIRE(net.original_id(2) == "u9");
  REQUIRE(net.find("u9") == NodeId{2});
  REQUIRE_FALSE(net.find("nope"));
}

TEST_CASE("edge CSV errors carry line numbers", "[graph]") {
  std::istringstream empty("");
  REQUIRE_THROWS_AS(read_edge_csv(empty, false), EmptyInputError);

  std::istringstream header_only("source,target\n");
  REQUIRE_THROWS_AS(read_edge_csv(header_only, true), EmptyInputError);

  std::istringstream bad("source,target\na,b\nc\n");
  try {
    read_edge_csv(bad, true);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 3);
  }

  std::istringstream quoted("\"a,1\",b\r\n");
  auto parsed = read_edge_csv(quoted, false);
  REQUIRE(parsed[0].source == "a,1");
  REQUIRE(parsed[0].target == "b");

  REQUIRE_THROWS_AS(load_network(std::vector<EdgeRow>{}), EmptyInputError);
}

TEST_CASE("from_edges rejects invalid edge lists", "[graph]") {
  REQUIRE_THROWS_AS(Network::from_edges(2, {{0, 0}}), InvalidArgument);
  REQUIRE_THROWS_AS(Network::from_edges(2, {{0, 1}, {1, 0}}), InvalidArgument);
  REQUIRE_THROWS_AS(Network::from_edges(2, {{0, 2}}), InvalidArgument);
}

TEST_CASE("serialize then load reproduces the canonical edge set", "[graph][property]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = generators::erdos_renyi(40, 0.1, seed);
    std::ostringstream edges_out, map_out;
    write_edge_csv(edges_out, net);
    write_id_map(map_out, net);

    std::istringstream edges_in(edges_out.str()), map_in(map_out.str());
    auto again = load_dense_network(read_edge_csv(edges_in, true), map_in);
    REQUIRE(again == net);
  }
}

TEST_CASE("giant_component picks the largest component", "[graph]") {
  // two triangles + a 4-clique
  auto net = from_pairs(10, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5},
                             {6, 7}, {6, 8}, {6, 9}, {7, 8}, {7, 9}, {8, 9}});
  auto gc = giant_component(net);
  REQUIRE(gc.network.node_count() == 4);
  REQUIRE(gc.network.edge_count() == 6);
  REQUIRE(gc.to_parent == std::vector<NodeId>{6, 7, 8, 9});
  REQUIRE(gc.network.original_id(0) == "6");

  auto path = from_pairs(4, {{0, 1}, {1, 2}});
  auto gp = giant_component(path);
  REQUIRE(gp.network.node_count() == 3);
  REQUIRE(gp.network.edge_count() == 2);

  auto connected = generators::erdos_renyi(30, 0.3, 4);
  REQUIRE(is_connected(connected));
  REQUIRE(giant_component(connected).network == connected);

  REQUIRE_THROWS_AS(giant_component(Network{}), EmptyInputError);
}

TEST_CASE("giant_component ties break on the smallest original id", "[graph]") {
  // two equal edges; the one holding id "2" wins over "10" numerically
  auto net = load_network(rows({{"10", "11"}, {"2", "3"}})).network;
  auto gc = giant_component(net);
  REQUIRE(gc.network.original_id(0) == "2");

  auto named = load_network(rows({{"zed", "amy"}, {"bob", "cat"}})).network;
  REQUIRE(giant_component(named).network.find("amy"));
}

TEST_CASE("giant_component output is connected", "[graph][property]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto net = generators::erdos_renyi(60, 0.03, seed);
    REQUIRE(is_connected(giant_component(net).network));
  }
}

TEST_CASE("configuration_rewire on a 4-cycle keeps every degree at 2", "[graph]") {
  auto cycle = from_pairs(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = configuration_rewire(cycle, 10, seed);
    REQUIRE(r.attempted == 40);
    for (auto d : r.network.degree_sequence()) REQUIRE(d == 2);
    require_simple_symmetric(r.network);
  }
}

TEST_CASE("configuration_rewire leaves a star unchanged", "[graph]") {
  // Enumerating all 24 oriented double-edge swaps on K(1,4) shows none yields
  // a different simple graph.
  auto star = from_pairs(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto r = configuration_rewire(star, 10, 7);
  REQUIRE(r.unchanged);
  REQUIRE(r.accepted == 0);
  REQUIRE(r.network == star);

  auto single = from_pairs(2, {{0, 1}});
  auto s = configuration_rewire(single, 10, 7);
  REQUIRE(s.unchanged);
  REQUIRE(s.network == single);

  REQUIRE_THROWS_AS(configuration_rewire(star, 0, 1), InvalidArgument);
}

TEST_CASE("configuration_rewire randomizes an Erdos-Renyi graph", "[graph][property]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto net = generators::erdos_renyi(100, 0.1, seed);
    auto r = configuration_rewire(net, 10, seed * 31);
    REQUIRE(r.network.degree_sequence() == net.degree_sequence());
    require_simple_symmetric(r.network);
    REQUIRE(edge_jaccard(net, r.network) < 0.5);
    REQUIRE(r.attempted == 10 * net.edge_count());
  }
}

TEST_CASE("configuration_rewire is reproducible per seed", "[graph]") {
  auto net = generators::erdos_renyi(50, 0.1, 3);
  REQUIRE(configuration_rewire(net, 5, 9).network == configuration_rewire(net, 5, 9).network);
}

TEST_CASE("heavy-tailed generator yields a connected simple graph", "[graph]") {
  auto net = generators::heavy_tailed_network(2000, 2.5, 2, 100, 11);
  REQUIRE(net.node_count() > 1800);
  REQUIRE(is_connected(net));
  require_simple_symmetric(net);
}
