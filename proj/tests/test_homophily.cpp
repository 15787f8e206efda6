#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "peerinfl/generators.hpp"
#include "peerinfl/homophily.hpp"

using namespace peerinfl;
using Catch::Matchers::WithinAbs;

namespace {

NodeAttributes votes(std::initializer_list<const char*> v) {
  auto a = NodeAttributes::empty(v.size());
  std::size_t i = 0;
  for (const char* s : v) a.vote[i++] = std::string(s);
  return a;
}

}  // namespace

TEST_CASE("same-vote fraction fixtures", "[homophily]") {
  auto triangle = Network::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  auto t = same_fraction_histogram(triangle, votes({"A", "A", "A"}), Attribute::vote, 10);
  REQUIRE(t.counts == std::vector<std::size_t>{0, 0, 0, 0, 0, 0, 0, 0, 0, 3});
  for (const auto& f : t.per_node) REQUIRE(f == 1.0);

  auto star = Network::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto s = same_fraction_histogram(star, votes({"A", "B", "B", "B", "B"}), Attribute::vote, 10);
  REQUIRE(s.counts == std::vector<std::size_t>{5, 0, 0, 0, 0, 0, 0, 0, 0, 0});

  auto cycle = Network::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto c = same_fraction_histogram(cycle, votes({"A", "B", "A", "B"}), Attribute::vote, 10);
  REQUIRE(c.counts == std::vector<std::size_t>{4, 0, 0, 0, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("same_fraction excludes missing values and isolated nodes", "[homophily]") {
  auto net = Network::from_edges(5, {{0, 1}, {1, 2}});
  auto a = NodeAttributes::empty(5);
  a.gender[0] = "f";
  a.gender[1] = "f";
  // node 2 missing, nodes 3 and 4 isolated
  a.gender[3] = "m";
  auto h = same_fraction_histogram(net, a, Attribute::gender, 4);
  REQUIRE(h.excluded_isolated == 2);
  REQUIRE(h.excluded_missing == 1);
  REQUIRE(h.per_node[0] == 1.0);
  REQUIRE(h.per_node[1] == 1.0);  // node 2 left out of the denominator
  REQUIRE(h.counts[3] == 2);
}

TEST_CASE("same_fraction ignores category names", "[homophily][property]") {
  std::mt19937_64 rng(4);
  auto net = generators::erdos_renyi(60, 0.1, 4);
  auto a = NodeAttributes::empty(60);
  auto b = NodeAttributes::empty(60);
  const char* names[] = {"x", "y", "z"};
  const char* renamed[] = {"q", "x", "w"};
  std::uniform_int_distribution<int> pick(0, 2);
  for (int i = 0; i < 60; ++i) {
    int k = pick(rng);
    a.locality[i] = names[k];
    b.locality[i] = renamed[k];
  }
  auto ha = same_fraction_histogram(net, a, Attribute::locality, 5);
  auto hb = same_fraction_histogram(net, b, Attribute::locality, 5);
  REQUIRE(ha.per_node == hb.per_node);
  REQUIRE(ha.counts == hb.counts);
}

TEST_CASE("unknown attribute names are rejected", "[homophily]") {
  REQUIRE_THROWS_AS(parse_attribute("shoe_size"), InvalidArgument);
  REQUIRE(parse_attribute("age_band") == Attribute::age_band);
}

TEST_CASE("mixing matrix fixtures", "[homophily]") {
  auto triangle = Network::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  auto one = mixing_matrix(triangle, votes({"A", "A", "A"}), Attribute::vote);
  REQUIRE(one.categories == std::vector<std::string>{"A"});
  REQUIRE(one.counts[0][0] == 3.0);
  REQUIRE(std::isnan(one.assortativity));

  auto cycle = Network::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto bip = mixing_matrix(cycle, votes({"A", "B", "A", "B"}), Attribute::vote);
  REQUIRE(bip.counts[0][0] == 0.0);
  REQUIRE(bip.counts[1][1] == 0.0);
  REQUIRE(bip.counts[0][1] == 2.0);
  REQUIRE(bip.total == 4.0);
  REQUIRE_THAT(bip.assortativity, WithinAbs(-1.0, 1e-12));
}

TEST_CASE("mixing matrix total equals counted edges", "[homophily][property]") {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = generators::erdos_renyi(50, 0.1, seed);
    auto a = NodeAttributes::empty(50);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int i = 0; i < 50; ++i)
      if (int k = pick(rng); k < 3) a.vote[i] = std::string(1, static_cast<char>('a' + k));
    auto m = mixing_matrix(net, a, Attribute::vote);
    double sum = 0;
    for (const auto& row : m.counts)
      for (double v : row) sum += v;
    REQUIRE(sum == m.total);
    REQUIRE(m.total + m.edges_skipped == net.edge_count());
    for (std::size_t x = 0; x < m.counts.size(); ++x)
      for (std::size_t y = 0; y < m.counts.size(); ++y) REQUIRE(m.counts[x][y] == m.counts[y][x]);
  }
}

TEST_CASE("random labels on an ER graph have near-zero assortativity", "[homophily]") {
  std::mt19937_64 rng(10);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> r;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto net = generators::erdos_renyi(200, 0.05, seed);
    auto a = NodeAttributes::empty(200);
    for (int i = 0; i < 200; ++i) a.gender[i] = coin(rng) ? "f" : "m";
    r.push_back(mixing_matrix(net, a, Attribute::gender).assortativity);
  }
  double mean = 0;
  for (double v : r) mean += v;
  mean /= r.size();
  double var = 0;
  for (double v : r) var += (v - mean) * (v - mean);
  double se = std::sqrt(var / (r.size() - 1)) / std::sqrt(static_cast<double>(r.size()));
  REQUIRE(std::abs(mean) <= 3 * se);
}

TEST_CASE("age gap fixtures", "[homophily]") {
  auto path = Network::from_edges(3, {{0, 1}, {1, 2}});
  auto a = NodeAttributes::empty(3);
  a.age = {20.0, 30.0, 40.0};
  auto h = age_gap_distribution(path, a);
  REQUIRE(h.counts == std::vector<std::pair<double, std::size_t>>{{10.0, 2}});

  a.age = {33.0, 33.0, 33.0};
  REQUIRE(age_gap_distribution(path, a).counts == std::vector<std::pair<double, std::size_t>>{{0.0, 2}});

  auto edge = Network::from_edges(2, {{0, 1}});
  auto b = NodeAttributes::empty(2);
  b.age = {20.0, 50.0};
  REQUIRE(age_gap_distribution(edge, b).counts == std::vector<std::pair<double, std::size_t>>{{30.0, 1}});

  b.age[1] = std::nullopt;
  auto skipped = age_gap_distribution(edge, b);
  REQUIRE(skipped.counts.empty());
  REQUIRE(skipped.edges_skipped == 1);
}

TEST_CASE("age bands", "[homophily]") {
  REQUIRE(age_band(17) == "<18");
  REQUIRE(age_band(18) == "18-30");
  REQUIRE(age_band(30) == "30-50");
  REQUIRE(age_band(64) == "50+");
}

TEST_CASE("attribute CSV", "[homophily]") {
  auto net = load_network(std::vector<EdgeRow>{{"a", "b", 1}}).network;
  std::istringstream in("id,vote,age,gender,locality\na,yes,34,f,Zagreb\nb,,,m,\nc,no,20,f,Split\n");
  auto loaded = read_attributes_csv(in, net, true);
  REQUIRE(loaded.unknown_ids_dropped == 1);
  REQUIRE(loaded.attributes.vote[0] == "yes");
  REQUIRE(loaded.attributes.age[0] == 34.0);
  REQUIRE_FALSE(loaded.attributes.vote[1]);
  REQUIRE_FALSE(loaded.attributes.age[1]);
  REQUIRE(loaded.attributes.gender[1] == "m");

  std::istringstream bad("a,yes,old,f,x\n");
  REQUIRE_THROWS_AS(read_attributes_csv(bad, net, false), ParseError);
}
