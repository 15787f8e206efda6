#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cascade.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "graph.hpp"

namespace peerinfl {

// External event firing at step t_fire with influence q0 exp(-lambda_e (t - t_fire)).
struct ExternalSpike {
  double q0 = 0.2;
  double lambda_e = 0.3;
  int t_fire = 5;

  double influence(int t) const {
    return t < t_fire ? 0.0 : q0 * std::exp(-lambda_e * static_cast<double>(t - t_fire));
  }
};

struct SimConfig {
  PeerParams peer{0.03, 0.02};
  std::vector<ExternalSpike> spikes{{0.2, 0.3, 5}, {0.2, 0.3, 15}};
  int steps = 30;
  std::optional<NodeId> seed_node;  // nullopt: uniformly random node
  std::uint64_t rng_seed = 1;

  void validate(const Network& net) const {
    peer.validate();
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    for (const auto& s : spikes) {
      if (!(s.q0 >= 0.0 && s.q0 <= 1.0)) throw InvalidArgument("q0 must lie in [0,1]");
      if (!(s.lambda_e >= 0.0) || !std::isfinite(s.lambda_e))
        throw InvalidArgument("lambda_e must be >= 0");
      if (s.t_fire < 0) throw InvalidArgument("t_fire must be >= 0");
    }
    if (net.node_count() == 0) throw EmptyInputError("network is empty");
    if (seed_node && *seed_node >= net.node_count()) throw InvalidArgument("seed node not in network");
  }
};

enum class TruthLabel { seed, peer, external };

inline std::string_view to_string(TruthLabel l) {
  switch (l) {
    case TruthLabel::seed: return "seed";
    case TruthLabel::peer: return "peer";
    case TruthLabel::external: return "external";
  }
  return "?";
}

struct LabeledCascade {
  Cascade cascade;  // horizon [0, steps]
  std::vector<std::optional<TruthLabel>> label;
  // Both the peer and the external draw fired; the label was a coin flip.
  std::vector<bool> both_fired;
  NodeId seed = 0;
};

// Discrete-time cascade. The seed activates at step 0. At each step
// t = 1..steps every non-activated node draws a peer Bernoulli with hazard
// 1 - prod_k (1 - p0 exp(-lambda_p (t - t_k))) over neighbors activated at
// t_k < t, and an external Bernoulli with hazard 1 - prod_s (1 - q0 exp(-lambda_e (t - t_fire)))
// over spikes with t_fire <= t. Draw order is fixed (ascending node id, peer
// draw then external draw) so a given rng_seed reproduces the run bitwise.
inline LabeledCascade simulate(const Network& net, const SimConfig& cfg) {
  cfg.validate(net);
  const std::size_t n = net.node_count();
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  NodeId seed = cfg.seed_node
                    ? *cfg.seed_node
                    : std::uniform_int_distribution<NodeId>(0, static_cast<NodeId>(n - 1))(rng);

  std::vector<Time> times(n, never);
  std::vector<std::optional<TruthLabel>> label(n);
  std::vector<bool> both(n, false);
  times[seed] = 0.0;
  label[seed] = TruthLabel::seed;

  std::vector<NodeId> pending;
  pending.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (i != seed) pending.push_back(static_cast<NodeId>(i));

  std::vector<NodeId> still_pending;
  for (int t = 1; t <= cfg.steps && !pending.empty(); ++t) {
    const Time now = static_cast<Time>(t);
    detail::ActivationChance external;
    for (const auto& s : cfg.spikes)
      if (s.t_fire <= t) external.add(s.influence(t));
    const double external_hazard = external.probability();

    still_pending.clear();
    for (NodeId i : pending) {
      detail::ActivationChance peer;
      for (NodeId k : net.neighbors(i)) {
        if (times[k] < now) peer.add(cfg.peer.influence(now - times[k]));
      }
      const double peer_hazard = peer.probability();
      const bool peer_fired = unit(rng) < peer_hazard;
      const bool external_fired = unit(rng) < external_hazard;
      if (!peer_fired && !external_fired) {
        still_pending.push_back(i);
        continue;
      }
      // Activations this step become visible to neighbors from step t+1 on.
      times[i] = now;
      if (peer_fired && external_fired) {
        both[i] = true;
        label[i] = unit(rng) < 0.5 ? TruthLabel::peer : TruthLabel::external;
      } else {
        label[i] = peer_fired ? TruthLabel::peer : TruthLabel::external;
      }
    }
    pending.swap(still_pending);
  }

  return {Cascade(std::move(times), {0.0, static_cast<Time>(cfg.steps)}), std::move(label),
          std::move(both), seed};
}

// key=value lines; '#' starts a comment. Keys: p0, lambda_p, steps, seed,
// seed_node (dense id), and spike (q0,lambda_e,t_fire; repeatable). Any
// spike line replaces the default spikes.
inline SimConfig parse_sim_config(std::istream& in, SimConfig cfg = {}) {
  std::string text;
  std::size_t line = 0;
  bool spikes_given = false;
  while (std::getline(in, text)) {
    ++line;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    auto body = csv::trim(text);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "expected key=value");
    auto key = std::string(csv::trim(body.substr(0, eq)));
    auto value = std::string(csv::trim(body.substr(eq + 1)));
    if (key == "p0") {
      cfg.peer.p0 = csv::parse_double(value, line, key);
    } else if (key == "lambda_p") {
      cfg.peer.lambda = csv::parse_double(value, line, key);
    } else if (key == "steps") {
      cfg.steps = static_cast<int>(csv::parse_double(value, line, key));
    } else if (key == "seed") {
      cfg.rng_seed = static_cast<std::uint64_t>(csv::parse_double(value, line, key));
    } else if (key == "seed_node") {
      cfg.seed_node = static_cast<NodeId>(csv::parse_double(value, line, key));
    } else if (key == "spike") {
      auto parts = csv::split_record(value, line);
      if (parts.size() != 3) throw ParseError(line, "spike expects q0,lambda_e,t_fire");
      if (!spikes_given) cfg.spikes.clear();
      spikes_given = true;
      cfg.spikes.push_back({csv::parse_double(parts[0], line, "q0"),
                            csv::parse_double(parts[1], line, "lambda_e"),
                            static_cast<int>(csv::parse_double(parts[2], line, "t_fire"))});
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace peerinfl
