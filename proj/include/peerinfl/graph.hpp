#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "error.hpp"

namespace peerinfl {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;  // u < v

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline std::uint64_t edge_key(Edge e) { return (std::uint64_t{e.u} << 32) | e.v; }

// Undirected simple graph over dense ids 0..node_count-1. Original string ids
// are kept in a side table; adjacency lists are sorted ascending.
class Network {
public:
  Network() = default;

  // Builds a network from an already clean edge list. Throws InvalidArgument
  // on self-loops, duplicates or out-of-range ids. When `original_ids` is
  // empty the dense id is used as the original id.
  static Network from_edges(std::size_t node_count, std::vector<Edge> edges,
                            std::vector<std::string> original_ids = {}) {
    if (node_count > std::numeric_limits<NodeId>::max())
      throw InvalidArgument("too many nodes");
    if (!original_ids.empty() && original_ids.size() != node_count)
      throw InvalidArgument("original id table size does not match node count");
    Network net;
    net.adjacency_.resize(node_count);
    for (auto& e : edges) {
      if (e.u >= node_count || e.v >= node_count) throw InvalidArgument("edge endpoint out of range");
      if (e.u == e.v) throw InvalidArgument("self-loop on node " + std::to_string(e.u));
      e = make_edge(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
      throw InvalidArgument("duplicate edge");
    for (const auto& e : edges) {
      net.adjacency_[e.u].push_back(e.v);
      net.adjacency_[e.v].push_back(e.u);
    }
    for (auto& list : net.adjacency_) std::sort(list.begin(), list.end());
    net.edges_ = std::move(edges);
    if (original_ids.empty()) {
      original_ids.reserve(node_count);
      for (std::size_t i = 0; i < node_count; ++i) original_ids.push_back(std::to_string(i));
    }
    net.original_ids_ = std::move(original_ids);
    net.index_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
      if (!net.index_.emplace(net.original_ids_[i], static_cast<NodeId>(i)).second)
        throw InvalidArgument("duplicate original id '" + net.original_ids_[i] + "'");
    }
    return net;
  }

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId i) const { return adjacency_.at(i); }
  std::size_t degree(NodeId i) const { return adjacency_.at(i).size(); }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& list = adjacency_.at(a);
    return std::binary_search(list.begin(), list.end(), b);
  }

  const std::string& original_id(NodeId i) const { return original_ids_.at(i); }
  std::span<const std::string> original_ids() const noexcept { return original_ids_; }

  std::optional<NodeId> find(const std::string& original) const {
    auto it = index_.find(original);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::size_t> degree_sequence() const {
    std::vector<std::size_t> out(node_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = adjacency_[i].size();
    return out;
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.edges_ == b.edges_ && a.original_ids_ == b.original_ids_;
  }

private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<std::string> original_ids_;
  std::unordered_map<std::string, NodeId> index_;
};

struct EdgeRow {
  std::string source;
  std::string target;
  std::size_t line = 0;
};

struct LoadReport {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

struct LoadedNetwork {
  Network network;
  LoadReport report;
};

// Dense ids are assigned in order of first appearance.
inline LoadedNetwork load_network(std::span<const EdgeRow> rows) {
  if (rows.empty()) throw EmptyInputError("edge list is empty");
  std::unordered_map<std::string, NodeId> dense;
  std::vector<std::string> originals;
  auto intern = [&](const EdgeRow& row, const std::string& id) {
    if (id.empty()) throw ParseError(row.line, "empty node id");
    auto [it, inserted] = dense.emplace(id, static_cast<NodeId>(originals.size()));
    if (inserted) originals.push_back(id);
    return it->second;
  };
  LoadReport report;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& row : rows) {
    NodeId a = intern(row, row.source);
    NodeId b = intern(row, row.target);
    if (a == b) {
      ++report.self_loops_dropped;
      continue;
    }
    Edge e = make_edge(a, b);
    if (!seen.insert(edge_key(e)).second) {
      ++report.duplicates_dropped;
      continue;
    }
    edges.push_back(e);
  }
  std::size_t n = originals.size();
  return {Network::from_edges(n, std::move(edges), std::move(originals)), report};
}

inline std::vector<EdgeRow> read_edge_csv(std::istream& in, bool has_header) {
  std::vector<EdgeRow> out;
  for (auto& row : csv::read_rows(in, has_header)) {
    if (row.fields.size() != 2)
      throw ParseError(row.line, "expected 2 columns (source,target), got " +
                                     std::to_string(row.fields.size()));
    if (row.fields[0].empty() || row.fields[1].empty()) throw ParseError(row.line, "empty node id");
    out.push_back({std::move(row.fields[0]), std::move(row.fields[1]), row.line});
  }
  if (out.empty()) throw EmptyInputError("edge list is empty");
  return out;
}

// Edge list in dense ids, as written by write_edge_csv.
inline void write_edge_csv(std::ostream& out, const Network& net) {
  out << "source,target\n";
  for (const auto& e : net.edges()) out << e.u << ',' << e.v << '\n';
}

inline void write_id_map(std::ostream& out, const Network& net) {
  out << "dense_id,original_id\n";
  for (std::size_t i = 0; i < net.node_count(); ++i)
    out << i << ',' << csv::escape(net.original_id(static_cast<NodeId>(i))) << '\n';
}

// Rebuilds a network serialized as a dense edge list plus id_map.csv.
inline Network load_dense_network(std::span<const EdgeRow> rows, std::istream& id_map) {
  auto map_rows = csv::read_rows(id_map, true);
  std::vector<std::string> originals(map_rows.size());
  std::vector<bool> filled(map_rows.size(), false);
  for (const auto& row : map_rows) {
    if (row.fields.size() != 2) throw ParseError(row.line, "expected dense_id,original_id");
    double id = csv::parse_double(row.fields[0], row.line, "dense id");
    if (id < 0 || id >= static_cast<double>(map_rows.size()) || id != static_cast<NodeId>(id) ||
        filled[static_cast<NodeId>(id)])
      throw ParseError(row.line, "dense id out of range or repeated");
    originals[static_cast<NodeId>(id)] = row.fields[1];
    filled[static_cast<NodeId>(id)] = true;
  }
  if (originals.empty()) throw EmptyInputError("id map is empty");
  std::vector<Edge> edges;
  edges.reserve(rows.size());
  for (const auto& row : rows) {
    double a = csv::parse_double(row.source, row.line, "dense id");
    double b = csv::parse_double(row.target, row.line, "dense id");
    if (a < 0 || b < 0 || a >= originals.size() || b >= originals.size() ||
        a != static_cast<NodeId>(a) || b != static_cast<NodeId>(b))
      throw ParseError(row.line, "dense id not in id map");
    edges.push_back(make_edge(static_cast<NodeId>(a), static_cast<NodeId>(b)));
  }
  std::size_t n = originals.size();
  return Network::from_edges(n, std::move(edges), std::move(originals));
}

namespace detail {

inline bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Numeric ids compare by value, anything else lexicographically.
inline bool id_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b)) {
    auto strip = [](const std::string& s) {
      auto p = s.find_first_not_of('0');
      return p == std::string::npos ? std::string("0") : s.substr(p);
    };
    std::string x = strip(a), y = strip(b);
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  }
  return a < b;
}

}  // namespace detail

// Induced subgraph on `keep` (ascending dense ids). to_parent[new] = old.
struct Subgraph {
  Network network;
  std::vector<NodeId> to_parent;
};

inline Subgraph induced_subgraph(const Network& net, std::vector<NodeId> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  constexpr NodeId absent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> to_child(net.node_count(), absent);
  std::vector<std::string> originals;
  originals.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    to_child.at(keep[i]) = static_cast<NodeId>(i);
    originals.push_back(net.original_id(keep[i]));
  }
  std::vector<Edge> edges;
  for (const auto& e : net.edges()) {
    if (to_child[e.u] != absent && to_child[e.v] != absent)
      edges.push_back(make_edge(to_child[e.u], to_child[e.v]));
  }
  return {Network::from_edges(keep.size(), std::move(edges), std::move(originals)),
          std::move(keep)};
}

// Component label per node, labels numbered in order of smallest dense id.
inline std::vector<std::size_t> connected_components(const Network& net,
                                                     std::size_t* count = nullptr) {
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(net.node_count(), unset);
  std::size_t next = 0;
  std::queue<NodeId> frontier;
  for (std::size_t s = 0; s < net.node_count(); ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    frontier.push(static_cast<NodeId>(s));
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop();
      for (NodeId v : net.neighbors(u)) {
        if (label[v] == unset) {
          label[v] = next;
          frontier.push(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

// Largest connected component. Ties go to the component holding the smallest
// original id.
inline Subgraph giant_component(const Network& net) {
  if (net.node_count() == 0) throw EmptyInputError("network is empty");
  std::size_t count = 0;
  auto label = connected_components(net, &count);
  std::vector<std::size_t> size(count, 0);
  std::vector<NodeId> min_member(count, std::numeric_limits<NodeId>::max());
  for (std::size_t i = 0; i < label.size(); ++i) {
    ++size[label[i]];
    auto& m = min_member[label[i]];
    if (m == std::numeric_limits<NodeId>::max() ||
        detail::id_less(net.original_id(static_cast<NodeId>(i)), net.original_id(m)))
      m = static_cast<NodeId>(i);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < count; ++c) {
    if (size[c] > size[best] ||
        (size[c] == size[best] &&
         detail::id_less(net.original_id(min_member[c]), net.original_id(min_member[best]))))
      best = c;
  }
  std::vector<NodeId> keep;
  keep.reserve(size[best]);
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] == best) keep.push_back(static_cast<NodeId>(i));
  return induced_subgraph(net, std::move(keep));
}

struct RewireResult {
  Network network;
  std::size_t attempted = 0;
  std::size_t accepted = 0;
  // Set when no swap could be applied; the input is returned unchanged.
  bool unchanged = false;
};

// Degree-preserving randomization by repeated double-edge swaps. Swaps that
// would create a self-loop or a multi-edge are rejected; exactly
// swaps_per_edge * edge_count swaps are attempted.
inline RewireResult configuration_rewire(const Network& net, std::size_t swaps_per_edge,
                                         std::uint64_t seed) {
  if (swaps_per_edge < 1) throw InvalidArgument("swaps_per_edge must be >= 1");
  RewireResult result;
  if (net.edge_count() < 2) {
    result.network = net;
    result.unchanged = true;
    return result;
  }
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2);
  for (const auto& e : edges) present.insert(edge_key(e));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  std::bernoulli_distribution flip(0.5);
  result.attempted = swaps_per_edge * edges.size();
  for (std::size_t k = 0; k < result.attempted; ++k) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    bool orient = flip(rng);
    if (i == j) continue;
    NodeId a = edges[i].u, b = edges[i].v;
    NodeId c = edges[j].u, d = edges[j].v;
    if (orient) std::swap(c, d);
    // (a,b),(c,d) -> (a,d),(c,b)
    if (a == d || c == b) continue;
    Edge e1 = make_edge(a, d), e2 = make_edge(c, b);
    if (present.count(edge_key(e1)) || present.count(edge_key(e2))) continue;
    present.erase(edge_key(edges[i]));
    present.erase(edge_key(edges[j]));
    present.insert(edge_key(e1));
    present.insert(edge_key(e2));
    edges[i] = e1;
    edges[j] = e2;
    ++result.accepted;
  }
  if (result.accepted == 0) {
    result.network = net;
    result.unchanged = true;
    return result;
  }
  std::vector<std::string> originals(net.original_ids().begin(), net.original_ids().end());
  result.network = Network::from_edges(net.node_count(), std::move(edges), std::move(originals));
  return result;
}

inline double edge_jaccard(const Network& a, const Network& b) {
  std::unordered_set<std::uint64_t> sa;
  for (const auto& e : a.edges()) sa.insert(edge_key(e));
  std::size_t common = 0;
  for (const auto& e : b.edges()) common += sa.count(edge_key(e));
  std::size_t uni = a.edge_count() + b.edge_count() - common;
  return uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace peerinfl
