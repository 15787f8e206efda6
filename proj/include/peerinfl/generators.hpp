#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "graph.hpp"

// Synthetic networks for experiments and tests.
namespace peerinfl::generators {

inline Network erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("edge probability must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  return Network::from_edges(n, std::move(edges));
}

// Degrees drawn from a discrete power law P(k) ~ k^-exponent on
// [min_degree, max_degree].
inline std::vector<std::size_t> power_law_degrees(std::size_t n, double exponent,
                                                  std::size_t min_degree, std::size_t max_degree,
                                                  std::mt19937_64& rng) {
  if (min_degree < 1 || max_degree < min_degree)
    throw InvalidArgument("invalid degree range");
  std::vector<double> weights;
  for (std::size_t k = min_degree; k <= max_degree; ++k)
    weights.push_back(std::pow(static_cast<double>(k), -exponent));
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  std::vector<std::size_t> degrees(n);
  std::size_t total = 0;
  for (auto& d : degrees) {
    d = min_degree + dist(rng);
    total += d;
  }
  if (total % 2 == 1) ++degrees[0];
  return degrees;
}

// Stub-matching configuration model; self-loops and multi-edges are erased,
// so realized degrees can fall slightly short of the requested ones.
inline Network configuration_model(const std::vector<std::size_t>& degrees, std::mt19937_64& rng) {
  std::vector<NodeId> stubs;
  for (std::size_t i = 0; i < degrees.size(); ++i)
    stubs.insert(stubs.end(), degrees[i], static_cast<NodeId>(i));
  std::shuffle(stubs.begin(), stubs.end(), rng);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
    if (stubs[k] == stubs[k + 1]) continue;
    Edge e = make_edge(stubs[k], stubs[k + 1]);
    if (seen.insert(edge_key(e)).second) edges.push_back(e);
  }
  return Network::from_edges(degrees.size(), std::move(edges));
}

// Giant component of a configuration model over a power-law degree sequence.
inline Network heavy_tailed_network(std::size_t n, double exponent, std::size_t min_degree,
                                    std::size_t max_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto degrees = power_law_degrees(n, exponent, min_degree, max_degree, rng);
  return giant_component(configuration_model(degrees, rng)).network;
}

}  // namespace peerinfl::generators
