#pragma once

// Reference evaluations used only by the tests. They scan a raw edge list
// and work in long double, sharing no code with the library's evaluation path.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

using EdgeList = std::vector<std::pair<int, int>>;
inline constexpr double inf = std::numeric_limits<double>::infinity();

inline bool adjacent(const EdgeList& edges, int a, int b) {
  for (auto [u, v] : edges)
    if ((u == a && v == b) || (u == b && v == a)) return true;
  return false;
}

// 1 - prod_{k ~ i, t_k < t} (1 - p0 exp(-lambda (t - t_k)))
inline double peer_probability(const EdgeList& edges, const std::vector<double>& times, double p0,
                               double lambda, int i, double t) {
  long double survive = 1.0L;
  for (int k = 0; k < static_cast<int>(times.size()); ++k) {
    if (k == i || !adjacent(edges, i, k) || !(times[k] < t)) continue;
    long double x = static_cast<long double>(p0) *
                    std::exp(-static_cast<long double>(lambda) * (static_cast<long double>(t) - times[k]));
    survive *= 1.0L - x;
  }
  return static_cast<double>(1.0L - survive);
}

// Mean over nodes with t_i > t; returns {mu, count}.
inline std::pair<double, std::size_t> mean_field(const EdgeList& edges, const std::vector<double>& times,
                                                 double p0, double lambda, double t) {
  long double sum = 0.0L;
  std::size_t n = 0;
  for (int i = 0; i < static_cast<int>(times.size()); ++i) {
    if (times[i] > t) {
      sum += peer_probability(edges, times, p0, lambda, i, t);
      ++n;
    }
  }
  return {n ? static_cast<double>(sum / n) : std::nan(""), n};
}

}  // namespace oracle
