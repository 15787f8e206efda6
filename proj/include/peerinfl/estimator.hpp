#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "cascade.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "parallel.hpp"

namespace peerinfl {

// Exponentially decaying peer influence p0 * exp(-lambda * elapsed).
struct PeerParams {
  double p0 = 0.6;
  double lambda = 0.001;

  void validate() const {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidArgument("p0 must lie in [0,1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be >= 0");
  }

  double influence(Time elapsed) const { return p0 * std::exp(-lambda * elapsed); }
};

namespace detail {

// Accumulates 1 - prod(1 - x_k) over independent activation chances x_k.
// Above kLogSpaceThreshold factors the product is taken in log space.
class ActivationChance {
public:
  static constexpr std::size_t kLogSpaceThreshold = 32;

  void add(double x) {
    product_ *= 1.0 - x;
    log_sum_ += std::log1p(-x);
    ++count_;
  }

  std::size_t count() const noexcept { return count_; }

  double probability() const {
    double p = count_ > kLogSpaceThreshold ? -std::expm1(log_sum_) : 1.0 - product_;
    return std::clamp(p, 0.0, 1.0);
  }

private:
  double product_ = 1.0;
  double log_sum_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace detail

// Probability that node i has been activated by its neighbors by time t:
// 1 - prod over neighbors k with t_k < t of (1 - p0 exp(-lambda (t - t_k))).
// Neighbors are visited in ascending id order.
inline double peer_probability(const Network& net, const Cascade& cascade, const PeerParams& params,
                               NodeId i, Time t) {
  detail::ActivationChance chance;
  for (NodeId k : net.neighbors(i)) {
    Time tk = cascade.time(k);
    if (tk < t) chance.add(params.influence(t - tk));
  }
  return chance.probability();
}

struct MeanField {
  double mu = 0.0;
  std::size_t non_activated = 0;
};

// Mean peer probability over nodes not activated at t (t_i in (t, +inf]).
// Throws DegenerateStateError when every node is already activated.
inline MeanField mean_nonactivated_probability(const Network& net, const Cascade& cascade,
                                               const PeerParams& params, Time t) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < cascade.node_count(); ++i) {
    if (cascade.times()[i] > t) {
      sum += peer_probability(net, cascade, params, static_cast<NodeId>(i), t);
      ++n;
    }
  }
  if (n == 0)
    throw DegenerateStateError("no non-activated nodes remain at t=" + csv::format_double(t));
  return {sum / static_cast<double>(n), n};
}

enum class EvalAt { window_end, activation_time };

inline std::string_view to_string(EvalAt e) {
  return e == EvalAt::window_end ? "window-end" : "activation-time";
}

enum class Label { peer, external };

inline std::string_view to_string(Label l) { return l == Label::peer ? "peer" : "external"; }

// Peer iff p >= mu, except that p == mu == 0 is external: a zero peer
// probability cannot explain an activation.
inline Label classify(double p, double mu) {
  if (p == 0.0 && mu == 0.0) return Label::external;
  return p - mu >= 0.0 ? Label::peer : Label::external;
}

struct NodeClassification {
  NodeId node = 0;
  Time activation = 0.0;
  Time eval_time = 0.0;
  double p = 0.0;
  double mu = 0.0;
  Label label = Label::external;
};

struct WindowDecomposition {
  Window window;
  std::size_t newly_activated_count = 0;
  std::size_t peer_count = 0;
  std::size_t external_count = 0;
  std::vector<NodeId> peer_nodes;
  std::vector<NodeId> external_nodes;
  // Threshold at the window end; NaN in activation-time mode when the
  // network is saturated at the window end.
  double mu = 0.0;
  std::vector<NodeClassification> nodes;
};

// Classifies every node newly activated in `w` as peer or external.
//
// In window-end mode p_i and mu are both evaluated at w.end, and mu runs over
// nodes still non-activated at w.end (so the window's own activations are
// excluded). In activation-time mode each node is evaluated at its own t_i.
inline WindowDecomposition decompose_window(const Network& net, const Cascade& cascade,
                                            const PeerParams& params, const Window& w,
                                            EvalAt eval_at = EvalAt::window_end) {
  params.validate();
  validate_window(w, cascade);
  WindowDecomposition out;
  out.window = w;
  auto newly = newly_activated(cascade, w);
  out.newly_activated_count = newly.size();

  if (eval_at == EvalAt::window_end) {
    out.mu = mean_nonactivated_probability(net, cascade, params, w.end).mu;
  } else {
    try {
      out.mu = mean_nonactivated_probability(net, cascade, params, w.end).mu;
    } catch (const DegenerateStateError&) {
      out.mu = std::numeric_limits<double>::quiet_NaN();
    }
  }

  std::map<Time, double> mu_at;
  for (NodeId i : newly) {
    NodeClassification nc;
    nc.node = i;
    nc.activation = cascade.time(i);
    if (eval_at == EvalAt::window_end) {
      nc.eval_time = w.end;
      nc.mu = out.mu;
    } else {
      nc.eval_time = nc.activation;
      auto it = mu_at.find(nc.eval_time);
      if (it == mu_at.end())
        it = mu_at.emplace(nc.eval_time,
                           mean_nonactivated_probability(net, cascade, params, nc.eval_time).mu)
                 .first;
      nc.mu = it->second;
    }
    nc.p = peer_probability(net, cascade, params, i, nc.eval_time);
    nc.label = classify(nc.p, nc.mu);
    (nc.label == Label::peer ? out.peer_nodes : out.external_nodes).push_back(i);
    out.nodes.push_back(nc);
  }
  out.peer_count = out.peer_nodes.size();
  out.external_count = out.external_nodes.size();
  return out;
}

struct SeriesOptions {
  Time delta = 7200.0;
  Time stride = 7200.0;
  EvalAt eval_at = EvalAt::window_end;
  unsigned threads = 0;  // 0: default_thread_count()
};

// Window k spans [t_start + k*stride, t_start + k*stride + delta], with the
// end clipped to the horizon end and the left edge open for every window
// that does not start at t_start. With stride == delta the windows tile the
// horizon and each activation falls in exactly one window.
inline std::vector<Window> series_windows(const Horizon& h, Time delta, Time stride) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be > 0");
  if (!(stride > 0.0) || !std::isfinite(stride)) throw InvalidArgument("stride must be > 0");
  std::vector<Window> out;
  if (h.end == h.start) {
    out.push_back({h.start + delta, delta, true});
    return out;
  }
  for (std::size_t k = 0;; ++k) {
    Time start = h.start + static_cast<Time>(k) * stride;
    if (k > 0 && start >= h.end) break;
    Time end = std::min(start + delta, h.end);
    out.push_back({end, end - start, k == 0});
    if (end >= h.end) break;
  }
  return out;
}

struct InfluenceSeries {
  std::vector<WindowDecomposition> windows;
  // End of the first window at which every node was already activated; the
  // series stops before it.
  std::optional<Time> saturated_at;

  std::size_t total_newly_activated() const {
    std::size_t s = 0;
    for (const auto& w : windows) s += w.newly_activated_count;
    return s;
  }
  std::size_t total_peer() const {
    std::size_t s = 0;
    for (const auto& w : windows) s += w.peer_count;
    return s;
  }
  std::size_t total_external() const {
    std::size_t s = 0;
    for (const auto& w : windows) s += w.external_count;
    return s;
  }
};

// Time from which no non-activated node remains, or `never`.
inline Time saturation_time(const Cascade& cascade) {
  if (cascade.activated_count() < cascade.node_count() || cascade.node_count() == 0) return never;
  return *std::max_element(cascade.times().begin(), cascade.times().end());
}

inline InfluenceSeries influence_series(const Network& net, const Cascade& cascade,
                                        const PeerParams& params, const SeriesOptions& opts) {
  params.validate();
  auto windows = series_windows(cascade.horizon(), opts.delta, opts.stride);
  InfluenceSeries series;
  Time saturated = saturation_time(cascade);
  if (opts.eval_at == EvalAt::window_end) {
    auto it = std::find_if(windows.begin(), windows.end(),
                           [&](const Window& w) { return w.end >= saturated; });
    if (it != windows.end()) {
      series.saturated_at = it->end;
      windows.erase(it, windows.end());
    }
  }
  series.windows.resize(windows.size());
  parallel_for(windows.size(), opts.threads, [&](std::size_t k) {
    series.windows[k] = decompose_window(net, cascade, params, windows[k], opts.eval_at);
  });
  return series;
}

struct BaselineSplit {
  std::vector<NodeId> peer_nodes;
  std::vector<NodeId> external_nodes;
};

// External iff no neighbor activated strictly before the node's own t_i.
inline BaselineSplit baseline_external(const Network& net, const Cascade& cascade, const Window& w) {
  validate_window(w, cascade);
  BaselineSplit out;
  for (NodeId i : newly_activated(cascade, w)) {
    Time ti = cascade.time(i);
    auto nbrs = net.neighbors(i);
    bool exposed = std::any_of(nbrs.begin(), nbrs.end(),
                               [&](NodeId k) { return cascade.time(k) < ti; });
    (exposed ? out.peer_nodes : out.external_nodes).push_back(i);
  }
  return out;
}

struct BaselineWindow {
  Window window;
  std::size_t peer_count = 0;
  std::size_t external_count = 0;
};

inline std::vector<BaselineWindow> baseline_series(const Network& net, const Cascade& cascade,
                                                   Time delta, Time stride) {
  std::vector<BaselineWindow> out;
  for (const auto& w : series_windows(cascade.horizon(), delta, stride)) {
    auto split = baseline_external(net, cascade, w);
    out.push_back({w, split.peer_nodes.size(), split.external_nodes.size()});
  }
  return out;
}

}  // namespace peerinfl
