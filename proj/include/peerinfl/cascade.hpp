#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "graph.hpp"

namespace peerinfl {

// One scalar timeline: epoch seconds for observed data, integer steps for
// simulations.
using Time = double;

inline constexpr Time never = std::numeric_limits<Time>::infinity();

struct Horizon {
  Time start = 0.0;
  Time end = 0.0;
};

// Activation time per dense node id; `never` marks a node that did not
// activate within the observation horizon.
class Cascade {
public:
  Cascade() = default;

  Cascade(std::vector<Time> activation, Horizon horizon)
      : activation_(std::move(activation)), horizon_(horizon) {
    if (!(horizon_.start <= horizon_.end) || !std::isfinite(horizon_.start) ||
        !std::isfinite(horizon_.end))
      throw InvalidArgument("invalid horizon");
    for (Time t : activation_) {
      if (t == never) continue;
      if (std::isnan(t) || t < horizon_.start || t > horizon_.end)
        throw InvalidArgument("activation time outside horizon");
      ++activated_;
    }
  }

  // Horizon defaults to [earliest, latest] activation (or [0,0] if none).
  static Cascade from_pairs(std::size_t node_count, std::span<const std::pair<NodeId, Time>> pairs,
                            std::optional<Horizon> horizon = std::nullopt) {
    std::vector<Time> activation(node_count, never);
    Time lo = never, hi = -never;
    for (auto [node, t] : pairs) {
      if (node >= node_count) throw InvalidArgument("activation for unknown node");
      if (activation[node] != never)
        throw InvalidArgument("node " + std::to_string(node) + " activated more than once");
      if (!std::isfinite(t)) throw InvalidArgument("activation time must be finite");
      activation[node] = t;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    Horizon h = horizon ? *horizon : (pairs.empty() ? Horizon{0.0, 0.0} : Horizon{lo, hi});
    return Cascade(std::move(activation), h);
  }

  std::size_t node_count() const noexcept { return activation_.size(); }
  std::size_t activated_count() const noexcept { return activated_; }
  const Horizon& horizon() const noexcept { return horizon_; }
  Time time(NodeId i) const { return activation_.at(i); }
  bool activated(NodeId i) const { return activation_.at(i) != never; }
  std::span<const Time> times() const noexcept { return activation_; }

  // Activated nodes ordered by (time, id).
  std::vector<NodeId> activation_order() const {
    std::vector<NodeId> out;
    out.reserve(activated_);
    for (std::size_t i = 0; i < activation_.size(); ++i)
      if (activation_[i] != never) out.push_back(static_cast<NodeId>(i));
    std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) {
      return activation_[a] != activation_[b] ? activation_[a] < activation_[b] : a < b;
    });
    return out;
  }

  // Same activations, relabelled through to_parent (child -> parent id).
  Cascade restricted(std::span<const NodeId> to_parent) const {
    std::vector<Time> act(to_parent.size());
    for (std::size_t i = 0; i < to_parent.size(); ++i) act[i] = activation_.at(to_parent[i]);
    return Cascade(std::move(act), horizon_);
  }

  // Drops activations outside [from, to] and narrows the horizon to match.
  Cascade time_filtered(Time from, Time to) const {
    std::vector<Time> act = activation_;
    for (auto& t : act)
      if (t < from || t > to) t = never;
    return Cascade(std::move(act), {from, to});
  }

private:
  std::vector<Time> activation_;
  Horizon horizon_;
  std::size_t activated_ = 0;
};

// Observation window ending at `end` with length `delta`. The right edge is
// always closed; the left edge is closed unless `closed_left` is false.
struct Window {
  Time end = 0.0;
  Time delta = 1.0;
  bool closed_left = true;

  Time start() const noexcept { return end - delta; }

  bool contains(Time t) const noexcept {
    return t <= end && (closed_left ? t >= start() : t > start());
  }
};

inline void validate_window(const Window& w, const Cascade& c) {
  if (!(w.delta > 0.0) || !std::isfinite(w.delta)) throw InvalidArgument("window delta must be > 0");
  if (w.start() < c.horizon().start) throw InvalidArgument("window starts before horizon");
}

// Nodes with t_i in the window, ascending id.
inline std::vector<NodeId> newly_activated(const Cascade& c, const Window& w) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < c.node_count(); ++i)
    if (c.times()[i] != never && w.contains(c.times()[i])) out.push_back(static_cast<NodeId>(i));
  return out;
}

// Nodes with t_i in (t, +inf], never-activated included, ascending id.
inline std::vector<NodeId> non_activated(const Cascade& c, Time t) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < c.node_count(); ++i)
    if (c.times()[i] > t) out.push_back(static_cast<NodeId>(i));
  return out;
}

struct HistogramBin {
  Time start = 0.0;
  std::size_t count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

// Consecutive bins [start + k*bin, start + (k+1)*bin) covering the horizon;
// an activation exactly at the horizon end lands in the final bin.
inline std::vector<HistogramBin> activity_histogram(
    const Cascade& c, Time bin, std::optional<std::span<const NodeId>> subset = std::nullopt) {
  if (!(bin > 0.0) || !std::isfinite(bin)) throw InvalidArgument("bin width must be > 0");
  const auto& h = c.horizon();
  auto nbins = static_cast<std::size_t>(std::floor((h.end - h.start) / bin)) + 1;
  std::vector<HistogramBin> out(nbins);
  for (std::size_t k = 0; k < nbins; ++k) out[k].start = h.start + static_cast<Time>(k) * bin;
  auto add = [&](NodeId i) {
    Time t = c.time(i);
    if (t == never) return;
    auto k = static_cast<std::size_t>(std::floor((t - h.start) / bin));
    out[std::min(k, nbins - 1)].count++;
  };
  if (subset) {
    std::unordered_set<NodeId> unique(subset->begin(), subset->end());
    for (NodeId i : unique) add(i);
  } else {
    for (std::size_t i = 0; i < c.node_count(); ++i) add(static_cast<NodeId>(i));
  }
  return out;
}

enum class TimeFormat { numeric, iso8601 };

// Parses YYYY-MM-DD[T ]hh:mm[:ss[.fff]][Z|+hh:mm|-hh:mm] to epoch seconds.
// A timestamp without zone designator is taken as UTC.
inline std::optional<Time> parse_iso8601(const std::string& s) {
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0, consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10)
    return std::nullopt;
  std::size_t pos = 10;
  double sec = 0.0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    ++pos;
    int n = 0;
    if (std::sscanf(s.c_str() + pos, "%2d:%2d%n", &hh, &mm, &n) != 2 || n != 5) return std::nullopt;
    pos += 5;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      std::size_t end = pos;
      while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.'))
        ++end;
      try {
        sec = csv::parse_double(s.substr(pos, end - pos), 0, "seconds");
      } catch (const ParseError&) {
        return std::nullopt;
      }
      pos = end;
    }
  }
  double offset = 0.0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      int oh = 0, om = 0, n = 0;
      if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n) != 2 || n != 5 ||
          pos + 6 != s.size())
        return std::nullopt;
      offset = (s[pos] == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || sec >= 61.0) return std::nullopt;
  auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + sec - offset;
}

struct ActivationRow {
  std::string id;
  Time time = 0.0;
  std::size_t line = 0;
};

// `utc_offset_hours` shifts every timestamp so bins align with local time.
inline std::vector<ActivationRow> read_activation_csv(std::istream& in, bool has_header,
                                                      TimeFormat format = TimeFormat::numeric,
                                                      double utc_offset_hours = 0.0) {
  std::vector<ActivationRow> out;
  for (auto& row : csv::read_rows(in, has_header)) {
    if (row.fields.size() != 2)
      throw ParseError(row.line, "expected 2 columns (id,timestamp), got " +
                                     std::to_string(row.fields.size()));
    if (row.fields[0].empty()) throw ParseError(row.line, "empty node id");
    Time t = 0.0;
    if (format == TimeFormat::numeric) {
      t = csv::parse_double(row.fields[1], row.line, "timestamp");
    } else {
      auto parsed = parse_iso8601(row.fields[1]);
      if (!parsed) throw ParseError(row.line, "cannot parse ISO-8601 timestamp '" + row.fields[1] + "'");
      t = *parsed;
    }
    out.push_back({std::move(row.fields[0]), t + utc_offset_hours * 3600.0, row.line});
  }
  return out;
}

struct BoundCascade {
  Cascade cascade;
  std::size_t unknown_ids_dropped = 0;
};

// Maps activation rows onto the network's dense ids. Rows for ids outside
// the network are dropped and counted; a repeated id is a parse error.
inline BoundCascade bind_cascade(const Network& net, std::span<const ActivationRow> rows,
                                 std::optional<Horizon> horizon = std::nullopt) {
  std::vector<std::pair<NodeId, Time>> pairs;
  std::vector<bool> seen(net.node_count(), false);
  std::size_t dropped = 0;
  for (const auto& row : rows) {
    auto node = net.find(row.id);
    if (!node) {
      ++dropped;
      continue;
    }
    if (seen[*node]) throw ParseError(row.line, "node '" + row.id + "' activated more than once");
    seen[*node] = true;
    pairs.emplace_back(*node, row.time);
  }
  if (horizon) {
    for (auto& [node, t] : pairs)
      if (t < horizon->start || t > horizon->end) t = never;
    std::erase_if(pairs, [](const auto& p) { return p.second == never; });
  }
  return {Cascade::from_pairs(net.node_count(), pairs, horizon), dropped};
}

struct GroupRow {
  std::string id;
  std::string group;
};

inline std::vector<GroupRow> read_group_csv(std::istream& in, bool has_header) {
  std::vector<GroupRow> out;
  for (auto& row : csv::read_rows(in, has_header)) {
    if (row.fields.size() != 2) throw ParseError(row.line, "expected 2 columns (id,group)");
    out.push_back({std::move(row.fields[0]), std::move(row.fields[1])});
  }
  return out;
}

}  // namespace peerinfl
