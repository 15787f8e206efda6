#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "graph.hpp"

namespace peerinfl {

// Optional per-node demographics, indexed by dense id.
struct NodeAttributes {
  std::vector<std::optional<std::string>> vote;
  std::vector<std::optional<double>> age;
  std::vector<std::optional<std::string>> gender;
  std::vector<std::optional<std::string>> locality;

  static NodeAttributes empty(std::size_t n) {
    NodeAttributes a;
    a.vote.resize(n);
    a.age.resize(n);
    a.gender.resize(n);
    a.locality.resize(n);
    return a;
  }

  std::size_t node_count() const noexcept { return vote.size(); }
};

struct LoadedAttributes {
  NodeAttributes attributes;
  std::size_t unknown_ids_dropped = 0;
};

// Columns id,vote,age,gender,locality; empty cells are missing values. Rows
// for ids not in the network are dropped and counted.
inline LoadedAttributes read_attributes_csv(std::istream& in, const Network& net, bool has_header) {
  LoadedAttributes out{NodeAttributes::empty(net.node_count()), 0};
  std::vector<bool> seen(net.node_count(), false);
  auto text = [](const std::string& s) -> std::optional<std::string> {
    if (s.empty()) return std::nullopt;
    return s;
  };
  for (auto& row : csv::read_rows(in, has_header)) {
    if (row.fields.size() != 5)
      throw ParseError(row.line, "expected 5 columns (id,vote,age,gender,locality)");
    auto node = net.find(row.fields[0]);
    if (!node) {
      ++out.unknown_ids_dropped;
      continue;
    }
    if (seen[*node]) throw ParseError(row.line, "duplicate attributes for '" + row.fields[0] + "'");
    seen[*node] = true;
    auto& a = out.attributes;
    a.vote[*node] = text(row.fields[1]);
    a.age[*node] = csv::parse_optional_double(row.fields[2], row.line, "age");
    a.gender[*node] = text(row.fields[3]);
    a.locality[*node] = text(row.fields[4]);
  }
  return out;
}

enum class Attribute { vote, gender, locality, age_band };

inline Attribute parse_attribute(std::string_view name) {
  if (name == "vote") return Attribute::vote;
  if (name == "gender") return Attribute::gender;
  if (name == "locality") return Attribute::locality;
  if (name == "age_band" || name == "age") return Attribute::age_band;
  throw InvalidArgument("unknown attribute '" + std::string(name) +
                        "' (expected vote, gender, locality or age_band)");
}

// Age bands 18-30, 30-50, 50+; younger ages get their own band.
inline std::string age_band(double age) {
  if (age < 18) return "<18";
  if (age < 30) return "18-30";
  if (age < 50) return "30-50";
  return "50+";
}

inline std::optional<std::string> category(const NodeAttributes& attrs, Attribute a, NodeId i) {
  switch (a) {
    case Attribute::vote: return attrs.vote.at(i);
    case Attribute::gender: return attrs.gender.at(i);
    case Attribute::locality: return attrs.locality.at(i);
    case Attribute::age_band:
      if (const auto& age = attrs.age.at(i)) return age_band(*age);
      return std::nullopt;
  }
  return std::nullopt;
}

struct SameFractionHistogram {
  // counts[k] covers [k/bins, (k+1)/bins); the last bin also holds 1.0.
  std::vector<std::size_t> counts;
  std::vector<std::optional<double>> per_node;
  std::size_t excluded_missing = 0;   // own value missing, or no neighbor with a value
  std::size_t excluded_isolated = 0;  // zero degree
};

// Per-node share of neighbors with the same category. Neighbors lacking the
// attribute are left out of the denominator.
inline SameFractionHistogram same_fraction_histogram(const Network& net, const NodeAttributes& attrs,
                                                     Attribute attribute, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("bins must be >= 1");
  if (attrs.node_count() != net.node_count())
    throw InvalidArgument("attribute table does not match network");
  SameFractionHistogram out;
  out.counts.assign(bins, 0);
  out.per_node.resize(net.node_count());
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    auto node = static_cast<NodeId>(i);
    if (net.degree(node) == 0) {
      ++out.excluded_isolated;
      continue;
    }
    auto own = category(attrs, attribute, node);
    std::size_t known = 0, same = 0;
    if (own) {
      for (NodeId k : net.neighbors(node)) {
        auto other = category(attrs, attribute, k);
        if (!other) continue;
        ++known;
        if (*other == *own) ++same;
      }
    }
    if (!own || known == 0) {
      ++out.excluded_missing;
      continue;
    }
    double f = static_cast<double>(same) / static_cast<double>(known);
    out.per_node[i] = f;
    auto k = static_cast<std::size_t>(f * static_cast<double>(bins));
    out.counts[std::min(k, bins - 1)]++;
  }
  return out;
}

// Symmetric edge mixing matrix. An edge joining categories a != b adds 0.5 to
// both (a,b) and (b,a); an edge inside category a adds 1 to (a,a). The
// entries therefore sum to the number of counted edges, and row a sums to
// half the edge ends attached to category a.
struct MixingMatrix {
  std::vector<std::string> categories;  // sorted
  std::vector<std::vector<double>> counts;
  double total = 0.0;
  // Newman's assortativity coefficient; NaN when only one category occurs.
  double assortativity = 0.0;
  std::size_t edges_skipped = 0;  // an endpoint lacks the attribute
};

inline MixingMatrix mixing_matrix(const Network& net, const NodeAttributes& attrs,
                                  Attribute attribute) {
  if (attrs.node_count() != net.node_count())
    throw InvalidArgument("attribute table does not match network");
  MixingMatrix out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < net.node_count(); ++i)
    if (auto c = category(attrs, attribute, static_cast<NodeId>(i))) index.emplace(*c, 0);
  for (auto& [name, idx] : index) {
    idx = out.categories.size();
    out.categories.push_back(name);
  }
  const std::size_t k = out.categories.size();
  out.counts.assign(k, std::vector<double>(k, 0.0));
  for (const auto& e : net.edges()) {
    auto a = category(attrs, attribute, e.u), b = category(attrs, attribute, e.v);
    if (!a || !b) {
      ++out.edges_skipped;
      continue;
    }
    std::size_t x = index[*a], y = index[*b];
    if (x == y) {
      out.counts[x][x] += 1.0;
    } else {
      out.counts[x][y] += 0.5;
      out.counts[y][x] += 0.5;
    }
    out.total += 1.0;
  }
  if (out.total == 0.0) {
    out.assortativity = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double trace = 0.0, sum_sq = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    trace += out.counts[x][x] / out.total;
    double row = 0.0;
    for (std::size_t y = 0; y < k; ++y) row += out.counts[x][y] / out.total;
    sum_sq += row * row;
  }
  out.assortativity = sum_sq >= 1.0 ? std::numeric_limits<double>::quiet_NaN()
                                    : (trace - sum_sq) / (1.0 - sum_sq);
  return out;
}

struct AgeGapHistogram {
  double bin_width = 1.0;
  // (bin start, edge count), ascending; a gap g lands in floor(g / width) * width.
  std::vector<std::pair<double, std::size_t>> counts;
  std::size_t edges_skipped = 0;
};

inline AgeGapHistogram age_gap_distribution(const Network& net, const NodeAttributes& attrs,
                                            double bin_width = 1.0) {
  if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be > 0");
  if (attrs.node_count() != net.node_count())
    throw InvalidArgument("attribute table does not match network");
  AgeGapHistogram out;
  out.bin_width = bin_width;
  std::map<double, std::size_t> bins;
  for (const auto& e : net.edges()) {
    const auto& a = attrs.age[e.u];
    const auto& b = attrs.age[e.v];
    if (!a || !b) {
      ++out.edges_skipped;
      continue;
    }
    double gap = std::abs(*a - *b);
    bins[std::floor(gap / bin_width) * bin_width]++;
  }
  out.counts.assign(bins.begin(), bins.end());
  return out;
}

}  // namespace peerinfl
