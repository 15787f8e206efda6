#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "cascade.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "graph.hpp"
#include "parallel.hpp"

namespace peerinfl {

// Share of visitors arriving via the social network on the first day
// (17587 of 25154), the default calibration target.
inline constexpr double kReferralPeerShare = 17587.0 / 25154.0;

struct Period {
  Time start = 0.0;
  Time end = 86400.0;
};

// First 24 hours (in seconds) from the first activation.
inline Period first_day(const Cascade& cascade) {
  Time first = never;
  for (Time t : cascade.times()) first = std::min(first, t);
  if (first == never) throw UndefinedFractionError("cascade has no activations");
  return {first, first + 86400.0};
}

// Same activations with the horizon widened to cover `period`.
inline Cascade cascade_for_period(const Cascade& cascade, const Period& period) {
  if (!(period.start < period.end)) throw InvalidArgument("period must have positive length");
  std::vector<Time> times(cascade.times().begin(), cascade.times().end());
  return Cascade(std::move(times), {std::min(period.start, cascade.horizon().start),
                                    std::max(period.end, cascade.horizon().end)});
}

struct PeriodSeries {
  std::vector<WindowDecomposition> windows;
  std::size_t activations = 0;
  std::size_t peer = 0;
};

// Tumbling windows of length `delta` over the period. Nodes activated
// before the period still exert influence; nodes activated after it count
// as non-activated.
inline PeriodSeries period_series(const Network& net, const Cascade& cascade,
                                  const PeerParams& params, const Period& period, Time delta,
                                  EvalAt eval_at = EvalAt::window_end) {
  params.validate();
  if (!(period.start < period.end)) throw InvalidArgument("period must have positive length");
  Time sat = saturation_time(cascade);
  Cascade view = cascade_for_period(cascade, period);
  PeriodSeries out;
  for (const auto& w : series_windows({period.start, period.end}, delta, delta)) {
    if (eval_at == EvalAt::window_end && w.end >= sat) break;
    auto d = decompose_window(net, view, params, w, eval_at);
    out.activations += d.newly_activated_count;
    out.peer += d.peer_count;
    out.windows.push_back(std::move(d));
  }
  return out;
}

// Fraction of activations inside `period` classified as peer.
inline double peer_fraction(const Network& net, const Cascade& cascade, const PeerParams& params,
                            const Period& period, Time delta = 7200.0,
                            EvalAt eval_at = EvalAt::window_end) {
  auto s = period_series(net, cascade, params, period, delta, eval_at);
  if (s.activations == 0) throw UndefinedFractionError("no activations in calibration period");
  return static_cast<double>(s.peer) / static_cast<double>(s.activations);
}

// Average ranks, ties sharing the mean rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

// Spearman rank correlation; NaN when either input is constant.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman needs paired samples");
  auto rx = average_ranks(x), ry = average_ranks(y);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

struct GridSpec {
  std::vector<double> lambdas;
  std::vector<double> p0s;

  // lambda log-spaced over [1e-4, 1e-2] (7 points), p0 = 0.1 .. 0.9.
  static GridSpec defaults() {
    GridSpec g;
    for (int k = 0; k < 7; ++k) g.lambdas.push_back(std::pow(10.0, -4.0 + k / 3.0));
    for (int k = 1; k <= 9; ++k) g.p0s.push_back(k / 10.0);
    return g;
  }
};

struct SweepOptions {
  std::optional<Period> period;  // nullopt: first_day()
  double target = kReferralPeerShare;
  double tolerance = 0.02;
  Time delta = 7200.0;
  EvalAt eval_at = EvalAt::window_end;
  // Bound on pairwise L1 distance between normalized peer-count curves of
  // selected cells; only reported.
  double robustness_bound = 0.5;
  unsigned threads = 0;
};

struct GridCell {
  std::size_t lambda_index = 0;
  std::size_t p0_index = 0;
};

struct CalibrationGrid {
  std::vector<double> lambdas;
  std::vector<double> p0s;
  Period period;
  double target = 0.0;
  double tolerance = 0.0;
  // Row-major: fractions[li * p0s.size() + pi].
  std::vector<double> fractions;
  std::vector<bool> selected_mask;
  std::vector<GridCell> selected;
  GridCell nearest;  // closest cell to target, reported when nothing is selected
  double spearman_p0 = 0.0;
  double spearman_lambda = 0.0;
  // Cell (lambda=0.001, p0=0.6) when present in the grid.
  std::optional<GridCell> illustrative;
  double robustness_max_l1 = 0.0;
  bool robustness_within_bound = true;

  double fraction(std::size_t li, std::size_t pi) const { return fractions.at(li * p0s.size() + pi); }
  bool is_selected(std::size_t li, std::size_t pi) const {
    return selected_mask.at(li * p0s.size() + pi);
  }
};

inline CalibrationGrid sweep(const Network& net, const Cascade& cascade, const GridSpec& grid,
                             const SweepOptions& opts = {}) {
  if (grid.lambdas.empty() || grid.p0s.empty()) throw InvalidArgument("calibration grid is empty");
  if (!(opts.tolerance >= 0.0)) throw InvalidArgument("tolerance must be >= 0");
  CalibrationGrid out;
  out.lambdas = grid.lambdas;
  out.p0s = grid.p0s;
  out.period = opts.period ? *opts.period : first_day(cascade);
  out.target = opts.target;
  out.tolerance = opts.tolerance;

  const std::size_t cols = grid.p0s.size();
  const std::size_t cells = grid.lambdas.size() * cols;
  out.fractions.assign(cells, 0.0);
  std::vector<std::vector<double>> curves(cells);
  parallel_for(cells, opts.threads, [&](std::size_t c) {
    PeerParams params{grid.p0s[c % cols], grid.lambdas[c / cols]};
    auto s = period_series(net, cascade, params, out.period, opts.delta, opts.eval_at);
    if (s.activations == 0) throw UndefinedFractionError("no activations in calibration period");
    out.fractions[c] = static_cast<double>(s.peer) / static_cast<double>(s.activations);
    auto& curve = curves[c];
    for (const auto& w : s.windows) curve.push_back(static_cast<double>(w.peer_count));
    double total = std::accumulate(curve.begin(), curve.end(), 0.0);
    if (total > 0)
      for (auto& v : curve) v /= total;
  });

  out.selected_mask.assign(cells, false);
  std::size_t best = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    double gap = std::abs(out.fractions[c] - out.target);
    if (gap <= out.tolerance + 1e-12) {
      out.selected_mask[c] = true;
      out.selected.push_back({c / cols, c % cols});
    }
    if (gap < std::abs(out.fractions[best] - out.target)) best = c;
  }
  out.nearest = {best / cols, best % cols};

  if (cells >= 2) {
    std::vector<double> p0, lambda;
    for (std::size_t c = 0; c < cells; ++c) {
      p0.push_back(grid.p0s[c % cols]);
      lambda.push_back(grid.lambdas[c / cols]);
    }
    out.spearman_p0 = spearman(p0, out.fractions);
    out.spearman_lambda = spearman(lambda, out.fractions);
  } else {
    out.spearman_p0 = out.spearman_lambda = std::numeric_limits<double>::quiet_NaN();
  }

  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  for (std::size_t li = 0; li < grid.lambdas.size(); ++li)
    for (std::size_t pi = 0; pi < cols; ++pi)
      if (close(grid.lambdas[li], 0.001) && close(grid.p0s[pi], 0.6)) out.illustrative = GridCell{li, pi};

  for (std::size_t a = 0; a < out.selected.size(); ++a) {
    for (std::size_t b = a + 1; b < out.selected.size(); ++b) {
      const auto& ca = curves[out.selected[a].lambda_index * cols + out.selected[a].p0_index];
      const auto& cb = curves[out.selected[b].lambda_index * cols + out.selected[b].p0_index];
      double l1 = 0;
      for (std::size_t k = 0; k < std::min(ca.size(), cb.size()); ++k) l1 += std::abs(ca[k] - cb[k]);
      out.robustness_max_l1 = std::max(out.robustness_max_l1, l1);
    }
  }
  out.robustness_within_bound = out.robustness_max_l1 <= opts.robustness_bound;
  return out;
}

}  // namespace peerinfl
