#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "peerinfl/calibrator.hpp"
#include "peerinfl/cascade.hpp"
#include "peerinfl/estimator.hpp"
#include "peerinfl/graph.hpp"
#include "peerinfl/homophily.hpp"
#include "peerinfl/simulator.hpp"

namespace peerinfl::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using csv::format_double;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

// Collects a command's files in memory and writes them together. Files are
// staged under temporary names and renamed only once all were written, so a
// failed command leaves no partial outputs behind.
class OutputSet {
public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

  std::ostringstream& file(const std::string& name) { return files_[name]; }

  void commit() {
    fs::create_directories(dir_);
    std::vector<fs::path> staged, placed;
    try {
      for (auto& [name, content] : files_) {
        fs::path tmp = fs::path(dir_) / (name + ".partial");
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        staged.push_back(tmp);
        out << content.str();
        out.close();
        if (!out) throw Error("failed writing '" + tmp.string() + "'");
      }
      for (auto& [name, content] : files_) {
        fs::path target = fs::path(dir_) / name;
        fs::rename(fs::path(dir_) / (name + ".partial"), target);
        placed.push_back(target);
      }
    } catch (...) {
      std::error_code ec;
      for (auto& p : staged) fs::remove(p, ec);
      for (auto& p : placed) fs::remove(p, ec);
      throw;
    }
  }

private:
  std::string dir_;
  std::map<std::string, std::ostringstream> files_;
};

struct Manifest {
  json doc;

  explicit Manifest(const std::string& command) {
    doc["tool"] = "peerinfl";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["parameters"] = json::object();
    doc["inputs"] = json::object();
    doc["seeds"] = json::object();
  }

  void input(const std::string& role, const std::string& path) {
    doc["inputs"][role] = {{"path", path}, {"sha256", sha256_file(path)}};
  }

  void write(OutputSet& outputs) const { outputs.file("manifest.json") << doc.dump(2) << '\n'; }
};

// Options shared by commands that read a network.
struct NetworkInput {
  std::string path;
  std::string id_map;
  bool giant = false;

  void add(CLI::App* app, bool offer_giant) {
    app->add_option("--network", path, "Edge list CSV (source,target)")->required();
    app->add_option("--id-map", id_map, "id_map.csv when the edge list uses dense ids");
    if (offer_giant) app->add_flag("--giant-component", giant, "Keep only the giant component");
  }
};

struct Common {
  bool header = false;
  std::string out_dir;
  unsigned threads = 0;

  void add(CLI::App* app) {
    app->add_flag("--header", header, "Input CSVs start with a header row");
    app->add_option("--out", out_dir, "Output directory")->required();
    app->add_option("--threads", threads, "Worker threads (default: $PEERINFL_THREADS or all cores)");
  }
};

Network load_network_input(const NetworkInput& ni, bool header, Manifest& manifest, std::ostream& err) {
  auto in = open_input(ni.path);
  auto rows = read_edge_csv(in, ni.id_map.empty() ? header : true);
  manifest.input("network", ni.path);
  if (!ni.id_map.empty()) {
    auto map_in = open_input(ni.id_map);
    manifest.input("id_map", ni.id_map);
    return load_dense_network(rows, map_in);
  }
  auto loaded = load_network(rows);
  if (loaded.report.self_loops_dropped)
    err << "warning: dropped " << loaded.report.self_loops_dropped << " self-loop(s)\n";
  if (loaded.report.duplicates_dropped)
    err << "warning: dropped " << loaded.report.duplicates_dropped << " duplicate edge(s)\n";
  return std::move(loaded.network);
}

struct CascadeInput {
  std::string path;
  std::string time_format = "numeric";
  double utc_offset = 0.0;
  std::optional<double> t_start, t_end;

  void add(CLI::App* app) {
    app->add_option("--cascade", path, "Activation CSV (id,timestamp)")->required();
    app->add_option("--time-format", time_format, "Timestamp format")
        ->check(CLI::IsMember({"numeric", "iso"}));
    app->add_option("--utc-offset", utc_offset, "Hours added to every timestamp");
    app->add_option("--t-start", t_start, "Drop activations before this time");
    app->add_option("--t-end", t_end, "Drop activations after this time");
  }

  std::vector<ActivationRow> read(bool header, Manifest& manifest) const {
    auto in = open_input(path);
    manifest.input("cascade", path);
    return read_activation_csv(in, header,
                               time_format == "iso" ? TimeFormat::iso8601 : TimeFormat::numeric,
                               utc_offset);
  }

  std::optional<Horizon> horizon(const std::vector<ActivationRow>& rows) const {
    if (!t_start && !t_end) return std::nullopt;
    Time lo = never, hi = -never;
    for (const auto& r : rows) {
      lo = std::min(lo, r.time);
      hi = std::max(hi, r.time);
    }
    Horizon h{t_start.value_or(lo), t_end.value_or(hi)};
    if (!(h.start <= h.end)) throw InvalidArgument("--t-start must not exceed --t-end");
    return h;
  }
};

// Network + cascade, with the time filter applied before the giant component.
struct Dataset {
  Network net;
  Cascade cascade;
};

Dataset load_dataset(const NetworkInput& ni, const CascadeInput& ci, bool header, Manifest& manifest,
                     std::ostream& err) {
  Network net = load_network_input(ni, header, manifest, err);
  auto rows = ci.read(header, manifest);
  auto bound = bind_cascade(net, rows, ci.horizon(rows));
  if (bound.unknown_ids_dropped)
    err << "warning: dropped " << bound.unknown_ids_dropped << " activation(s) for ids not in the network\n";
  Cascade cascade = std::move(bound.cascade);
  if (ni.giant) {
    auto gc = giant_component(net);
    cascade = cascade.restricted(gc.to_parent);
    net = std::move(gc.network);
  }
  return {std::move(net), std::move(cascade)};
}

EvalAt parse_eval_at(const std::string& s) {
  return s == "activation-time" ? EvalAt::activation_time : EvalAt::window_end;
}

json window_json(const WindowDecomposition& w) {
  return {{"window_start", w.window.start()},
          {"window_end", w.window.end},
          {"newly_activated", w.newly_activated_count},
          {"peer_count", w.peer_count},
          {"external_count", w.external_count},
          {"mu", std::isnan(w.mu) ? json(nullptr) : json(w.mu)}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  NetworkInput network;
  std::string config;
  double p0 = 0.03, lambda_p = 0.02, q0 = 0.2, lambda_e = 0.3;
  std::vector<int> spike_at{5, 15};
  std::vector<std::string> spikes;
  int steps = 30;
  std::string seed_node;
  std::uint64_t seed = 1;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* cmd = app.add_subcommand("simulate", "Simulate a labeled cascade on a network");
  a.common.add(cmd);
  a.network.add(cmd, true);
  cmd->add_option("--config", a.config, "key=value file (p0, lambda_p, steps, seed, seed_node, spike)");
  cmd->add_option("--p0", a.p0, "Peer influence at activation");
  cmd->add_option("--lambda-p", a.lambda_p, "Peer influence decay per step");
  cmd->add_option("--q0", a.q0, "External spike strength");
  cmd->add_option("--lambda-e", a.lambda_e, "External spike decay per step");
  cmd->add_option("--spike-at", a.spike_at, "Steps at which spikes fire")->delimiter(',');
  cmd->add_option("--spike", a.spikes, "Explicit spike q0,lambda_e,t_fire (repeatable)");
  cmd->add_option("--steps", a.steps, "Number of steps");
  cmd->add_option("--seed-node", a.seed_node, "Original id of the seed (default: random)");
  cmd->add_option("--seed", a.seed, "RNG seed");
}

int run_simulate(CLI::App& cmd, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  Manifest manifest("simulate");
  Network net = load_network_input(a.network, a.common.header, manifest, err);
  if (a.network.giant) net = giant_component(net).network;

  SimConfig cfg;
  if (!a.config.empty()) {
    auto in = open_input(a.config);
    manifest.input("config", a.config);
    cfg = parse_sim_config(in, cfg);
  }
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  if (given("--p0") || a.config.empty()) cfg.peer.p0 = a.p0;
  if (given("--lambda-p") || a.config.empty()) cfg.peer.lambda = a.lambda_p;
  if (given("--steps") || a.config.empty()) cfg.steps = a.steps;
  if (given("--seed") || a.config.empty()) cfg.rng_seed = a.seed;
  if (!a.spikes.empty()) {
    cfg.spikes.clear();
    for (const auto& s : a.spikes) {
      auto parts = csv::split_record(s, 0);
      if (parts.size() != 3) throw InvalidArgument("--spike expects q0,lambda_e,t_fire");
      cfg.spikes.push_back({csv::parse_double(parts[0], 0, "q0"), csv::parse_double(parts[1], 0, "lambda_e"),
                            static_cast<int>(csv::parse_double(parts[2], 0, "t_fire"))});
    }
  } else if (given("--q0") || given("--lambda-e") || given("--spike-at") || a.config.empty()) {
    cfg.spikes.clear();
    for (int t : a.spike_at) cfg.spikes.push_back({a.q0, a.lambda_e, t});
  }
  if (!a.seed_node.empty()) {
    auto node = net.find(a.seed_node);
    if (!node) throw InvalidArgument("seed node '" + a.seed_node + "' not in network");
    cfg.seed_node = *node;
  }

  auto sim = simulate(net, cfg);

  auto& p = manifest.doc["parameters"];
  p["p0"] = cfg.peer.p0;
  p["lambda_p"] = cfg.peer.lambda;
  p["steps"] = cfg.steps;
  p["spikes"] = json::array();
  for (const auto& s : cfg.spikes) p["spikes"].push_back({{"q0", s.q0}, {"lambda_e", s.lambda_e}, {"t_fire", s.t_fire}});
  p["seed_node"] = cfg.seed_node ? json(net.original_id(*cfg.seed_node)) : json("random");
  p["giant_component"] = a.network.giant;
  manifest.doc["seeds"]["rng"] = cfg.rng_seed;

  OutputSet outputs(a.common.out_dir);
  auto& acts = outputs.file("activations.csv");
  auto& truth = outputs.file("ground_truth.csv");
  acts << "id,timestamp\n";
  truth << "id,label,both_fired\n";
  std::size_t counts[3] = {0, 0, 0};
  for (NodeId i : sim.cascade.activation_order()) {
    const auto& id = csv::escape(net.original_id(i));
    acts << id << ',' << format_double(sim.cascade.time(i)) << '\n';
    truth << id << ',' << to_string(*sim.label[i]) << ',' << (sim.both_fired[i] ? 1 : 0) << '\n';
    counts[static_cast<int>(*sim.label[i])]++;
  }
  manifest.write(outputs);
  outputs.commit();
  out << "activated " << sim.cascade.activated_count() << " of " << net.node_count()
      << " nodes (seed " << net.original_id(sim.seed) << ", peer " << counts[1] << ", external "
      << counts[2] << ")\n";
  return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  Common common;
  NetworkInput network;
  CascadeInput cascade;
  double p0 = 0.6, lambda = 0.001, delta = 7200.0;
  std::optional<double> stride;
  std::string eval_at = "window-end";
  bool baseline = false;
  std::string ground_truth;
};

void add_estimate(CLI::App& app, EstimateArgs& a) {
  auto* cmd = app.add_subcommand("estimate", "Split a cascade into peer and external activations");
  a.common.add(cmd);
  a.network.add(cmd, true);
  a.cascade.add(cmd);
  cmd->add_option("--p0", a.p0, "Peer influence at activation");
  cmd->add_option("--lambda", a.lambda, "Peer influence decay per time unit");
  cmd->add_option("--delta", a.delta, "Window length (time units)");
  cmd->add_option("--stride", a.stride, "Window stride (default: delta)");
  cmd->add_option("--eval-at", a.eval_at, "Evaluation time of p_i and mu")
      ->check(CLI::IsMember({"window-end", "activation-time"}));
  cmd->add_flag("--baseline", a.baseline, "Also emit the no-activated-friend baseline series");
  cmd->add_option("--ground-truth", a.ground_truth, "ground_truth.csv from simulate; prints a confusion table");
}

int run_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  Manifest manifest("estimate");
  auto data = load_dataset(a.network, a.cascade, a.common.header, manifest, err);
  PeerParams params{a.p0, a.lambda};
  SeriesOptions opts{a.delta, a.stride.value_or(a.delta), parse_eval_at(a.eval_at), a.common.threads};
  auto series = influence_series(data.net, data.cascade, params, opts);
  if (series.saturated_at)
    err << "warning: every node is activated by t=" << format_double(*series.saturated_at)
        << "; series stops there\n";

  auto& p = manifest.doc["parameters"];
  p["p0"] = params.p0;
  p["lambda"] = params.lambda;
  p["delta"] = opts.delta;
  p["stride"] = opts.stride;
  p["eval_at"] = to_string(opts.eval_at);
  p["baseline"] = a.baseline;
  p["giant_component"] = a.network.giant;
  p["time_format"] = a.cascade.time_format;
  p["utc_offset"] = a.cascade.utc_offset;
  p["t_start"] = a.cascade.t_start ? json(*a.cascade.t_start) : json(nullptr);
  p["t_end"] = a.cascade.t_end ? json(*a.cascade.t_end) : json(nullptr);

  OutputSet outputs(a.common.out_dir);
  auto& series_csv = outputs.file("series.csv");
  auto& nodes_csv = outputs.file("nodes.csv");
  series_csv << "window_end,newly_activated,peer_count,external_count,mu\n";
  nodes_csv << "id,t_i,window_end,p_i,mu,label\n";
  json doc;
  doc["parameters"] = p;
  doc["saturated_at"] = series.saturated_at ? json(*series.saturated_at) : json(nullptr);
  doc["windows"] = json::array();
  doc["nodes"] = json::array();
  for (const auto& w : series.windows) {
    series_csv << format_double(w.window.end) << ',' << w.newly_activated_count << ',' << w.peer_count
               << ',' << w.external_count << ',' << format_double(w.mu) << '\n';
    doc["windows"].push_back(window_json(w));
    for (const auto& nc : w.nodes) {
      const auto& id = data.net.original_id(nc.node);
      nodes_csv << csv::escape(id) << ',' << format_double(nc.activation) << ','
                << format_double(w.window.end) << ',' << format_double(nc.p) << ','
                << format_double(nc.mu) << ',' << to_string(nc.label) << '\n';
      doc["nodes"].push_back({{"id", id},
                              {"t_i", nc.activation},
                              {"window_end", w.window.end},
                              {"p_i", nc.p},
                              {"mu", nc.mu},
                              {"label", to_string(nc.label)}});
    }
  }

  if (a.baseline) {
    auto& base_csv = outputs.file("baseline_series.csv");
    base_csv << "window_end,newly_activated,peer_count,external_count\n";
    doc["baseline"] = json::array();
    for (const auto& b : baseline_series(data.net, data.cascade, opts.delta, opts.stride)) {
      base_csv << format_double(b.window.end) << ',' << b.peer_count + b.external_count << ','
               << b.peer_count << ',' << b.external_count << '\n';
      doc["baseline"].push_back({{"window_end", b.window.end},
                                 {"peer_count", b.peer_count},
                                 {"external_count", b.external_count}});
    }
  }

  if (!a.ground_truth.empty()) {
    auto in = open_input(a.ground_truth);
    manifest.input("ground_truth", a.ground_truth);
    std::map<std::string, std::string> truth;
    for (auto& row : csv::read_rows(in, true)) {
      if (row.fields.size() != 3) throw ParseError(row.line, "expected id,label,both_fired");
      truth[row.fields[0]] = row.fields[1];
    }
    // rows: truth peer/external, columns: estimated peer/external
    std::size_t m[2][2] = {{0, 0}, {0, 0}};
    for (const auto& w : series.windows) {
      for (const auto& nc : w.nodes) {
        auto it = truth.find(data.net.original_id(nc.node));
        if (it == truth.end() || it->second == "seed") continue;
        m[it->second == "peer" ? 0 : 1][nc.label == Label::peer ? 0 : 1]++;
      }
    }
    auto rate = [](std::size_t hit, std::size_t miss) {
      return hit + miss ? static_cast<double>(hit) / static_cast<double>(hit + miss) : 0.0;
    };
    double balanced = (rate(m[0][0], m[0][1]) + rate(m[1][1], m[1][0])) / 2.0;
    out << "confusion (rows truth, cols estimate)\n"
        << "            peer  external\n"
        << "peer      " << std::setw(6) << m[0][0] << "  " << std::setw(8) << m[0][1] << '\n'
        << "external  " << std::setw(6) << m[1][0] << "  " << std::setw(8) << m[1][1] << '\n'
        << "balanced accuracy " << format_double(balanced) << '\n';
    outputs.file("confusion.json") << json{{"truth_peer_est_peer", m[0][0]},
                                           {"truth_peer_est_external", m[0][1]},
                                           {"truth_external_est_peer", m[1][0]},
                                           {"truth_external_est_external", m[1][1]},
                                           {"balanced_accuracy", balanced}}
                                          .dump(2)
                                   << '\n';
  }

  outputs.file("series.json") << doc.dump(2) << '\n';
  manifest.write(outputs);
  outputs.commit();
  out << "windows " << series.windows.size() << ", activations " << series.total_newly_activated()
      << ", peer " << series.total_peer() << ", external " << series.total_external() << '\n';
  return 0;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  Common common;
  NetworkInput network;
  CascadeInput cascade;
  std::vector<double> lambdas = GridSpec::defaults().lambdas;
  std::vector<double> p0s = GridSpec::defaults().p0s;
  std::optional<double> period_start, period_end;
  double target = kReferralPeerShare;
  double tolerance = 0.02;
  double delta = 7200.0;
  std::string eval_at = "window-end";
  double robustness_bound = 0.5;
};

void add_calibrate(CLI::App& app, CalibrateArgs& a) {
  auto* cmd = app.add_subcommand("calibrate", "Sweep (lambda, p0) against a target peer fraction");
  a.common.add(cmd);
  a.network.add(cmd, true);
  a.cascade.add(cmd);
  cmd->add_option("--lambdas", a.lambdas, "Comma-separated lambda grid")->delimiter(',');
  cmd->add_option("--p0s", a.p0s, "Comma-separated p0 grid")->delimiter(',');
  cmd->add_option("--period-start", a.period_start, "Calibration period start (default: first activation)");
  cmd->add_option("--period-end", a.period_end, "Calibration period end (default: start + 86400)");
  cmd->add_option("--target", a.target, "Target peer fraction");
  cmd->add_option("--tolerance", a.tolerance, "Selection tolerance around the target");
  cmd->add_option("--delta", a.delta, "Window length");
  cmd->add_option("--eval-at", a.eval_at, "Evaluation time of p_i and mu")
      ->check(CLI::IsMember({"window-end", "activation-time"}));
  cmd->add_option("--robustness-bound", a.robustness_bound, "Reported bound on curve L1 distance");
}

int run_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  Manifest manifest("calibrate");
  auto data = load_dataset(a.network, a.cascade, a.common.header, manifest, err);
  SweepOptions opts;
  Period day = first_day(data.cascade);
  Time start = a.period_start.value_or(day.start);
  opts.period = Period{start, a.period_end.value_or(start + 86400.0)};
  opts.target = a.target;
  opts.tolerance = a.tolerance;
  opts.delta = a.delta;
  opts.eval_at = parse_eval_at(a.eval_at);
  opts.robustness_bound = a.robustness_bound;
  opts.threads = a.common.threads;
  auto grid = sweep(data.net, data.cascade, {a.lambdas, a.p0s}, opts);

  auto& p = manifest.doc["parameters"];
  p["lambdas"] = a.lambdas;
  p["p0s"] = a.p0s;
  p["period"] = {opts.period->start, opts.period->end};
  p["target"] = opts.target;
  p["tolerance"] = opts.tolerance;
  p["delta"] = opts.delta;
  p["eval_at"] = to_string(opts.eval_at);
  p["giant_component"] = a.network.giant;

  OutputSet outputs(a.common.out_dir);
  auto& grid_csv = outputs.file("grid.csv");
  grid_csv << "lambda,p0,peer_fraction,selected\n";
  for (std::size_t li = 0; li < grid.lambdas.size(); ++li)
    for (std::size_t pi = 0; pi < grid.p0s.size(); ++pi)
      grid_csv << format_double(grid.lambdas[li]) << ',' << format_double(grid.p0s[pi]) << ','
               << format_double(grid.fraction(li, pi)) << ',' << (grid.is_selected(li, pi) ? 1 : 0) << '\n';

  auto cell = [&](const GridCell& c) {
    return json{{"lambda", grid.lambdas[c.lambda_index]},
                {"p0", grid.p0s[c.p0_index]},
                {"peer_fraction", grid.fraction(c.lambda_index, c.p0_index)}};
  };
  auto nan_safe = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json doc;
  doc["target"] = grid.target;
  doc["tolerance"] = grid.tolerance;
  doc["period"] = {grid.period.start, grid.period.end};
  doc["selected"] = json::array();
  for (const auto& c : grid.selected) doc["selected"].push_back(cell(c));
  doc["nearest"] = cell(grid.nearest);
  doc["illustrative"] = grid.illustrative ? cell(*grid.illustrative) : json(nullptr);
  if (grid.illustrative)
    doc["illustrative"]["selected"] =
        grid.is_selected(grid.illustrative->lambda_index, grid.illustrative->p0_index);
  doc["spearman_p0"] = nan_safe(grid.spearman_p0);
  doc["spearman_lambda"] = nan_safe(grid.spearman_lambda);
  doc["robustness_max_l1"] = grid.robustness_max_l1;
  doc["robustness_within_bound"] = grid.robustness_within_bound;
  outputs.file("calibration.json") << doc.dump(2) << '\n';
  manifest.write(outputs);
  outputs.commit();

  out << grid.selected.size() << " of " << grid.fractions.size() << " grid points within "
      << format_double(grid.tolerance) << " of target " << format_double(grid.target) << '\n';
  if (grid.selected.empty())
    out << "nearest: lambda=" << format_double(grid.lambdas[grid.nearest.lambda_index])
        << " p0=" << format_double(grid.p0s[grid.nearest.p0_index]) << " fraction="
        << format_double(grid.fraction(grid.nearest.lambda_index, grid.nearest.p0_index)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- rewire

struct RewireArgs {
  Common common;
  NetworkInput network;
  std::size_t swaps_per_edge = 10;
  std::uint64_t seed = 1;
};

void add_rewire(CLI::App& app, RewireArgs& a) {
  auto* cmd = app.add_subcommand("rewire", "Degree-preserving configuration-model rewiring");
  a.common.add(cmd);
  a.network.add(cmd, true);
  cmd->add_option("--swaps-per-edge", a.swaps_per_edge, "Attempted double-edge swaps per edge");
  cmd->add_option("--seed", a.seed, "RNG seed");
}

int run_rewire(const RewireArgs& a, std::ostream& out, std::ostream& err) {
  Manifest manifest("rewire");
  Network net = load_network_input(a.network, a.common.header, manifest, err);
  if (a.network.giant) net = giant_component(net).network;
  auto result = configuration_rewire(net, a.swaps_per_edge, a.seed);
  if (result.unchanged) err << "warning: no legal swap found; network returned unchanged\n";
  manifest.doc["parameters"]["swaps_per_edge"] = a.swaps_per_edge;
  manifest.doc["parameters"]["giant_component"] = a.network.giant;
  manifest.doc["seeds"]["rng"] = a.seed;

  OutputSet outputs(a.common.out_dir);
  write_edge_csv(outputs.file("edges.csv"), result.network);
  write_id_map(outputs.file("id_map.csv"), result.network);
  manifest.write(outputs);
  outputs.commit();
  out << "accepted " << result.accepted << " of " << result.attempted << " swaps; edge overlap "
      << format_double(edge_jaccard(net, result.network)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- homophily

struct HomophilyArgs {
  Common common;
  NetworkInput network;
  std::string attributes;
  std::string attribute = "vote";
  std::size_t bins = 10;
  double age_bin_width = 1.0;
};

void add_homophily(CLI::App& app, HomophilyArgs& a) {
  auto* cmd = app.add_subcommand("homophily", "Attribute homophily profiles");
  a.common.add(cmd);
  a.network.add(cmd, true);
  cmd->add_option("--attributes", a.attributes, "Attributes CSV (id,vote,age,gender,locality)")->required();
  cmd->add_option("--attribute", a.attribute, "vote, gender, locality or age_band");
  cmd->add_option("--bins", a.bins, "Bins for the same-attribute fraction histogram");
  cmd->add_option("--age-bin-width", a.age_bin_width, "Bin width of the age-gap histogram");
}

int run_homophily(const HomophilyArgs& a, std::ostream& out, std::ostream& err) {
  Manifest manifest("homophily");
  Network net = load_network_input(a.network, a.common.header, manifest, err);
  if (a.network.giant) net = giant_component(net).network;
  Attribute attribute = parse_attribute(a.attribute);
  auto in = open_input(a.attributes);
  manifest.input("attributes", a.attributes);
  auto loaded = read_attributes_csv(in, net, a.common.header);
  if (loaded.unknown_ids_dropped)
    err << "warning: dropped " << loaded.unknown_ids_dropped << " attribute row(s) for unknown ids\n";

  auto same = same_fraction_histogram(net, loaded.attributes, attribute, a.bins);
  auto mixing = mixing_matrix(net, loaded.attributes, attribute);
  auto gaps = age_gap_distribution(net, loaded.attributes, a.age_bin_width);

  auto& p = manifest.doc["parameters"];
  p["attribute"] = a.attribute;
  p["bins"] = a.bins;
  p["age_bin_width"] = a.age_bin_width;
  p["giant_component"] = a.network.giant;

  OutputSet outputs(a.common.out_dir);
  auto& same_csv = outputs.file("same_fraction.csv");
  same_csv << "bin_start,bin_end,count\n";
  for (std::size_t k = 0; k < same.counts.size(); ++k)
    same_csv << format_double(static_cast<double>(k) / a.bins) << ','
             << format_double(static_cast<double>(k + 1) / a.bins) << ',' << same.counts[k] << '\n';
  auto& mix_csv = outputs.file("mixing.csv");
  mix_csv << "category_u,category_v,count\n";
  for (std::size_t x = 0; x < mixing.categories.size(); ++x)
    for (std::size_t y = 0; y < mixing.categories.size(); ++y)
      mix_csv << csv::escape(mixing.categories[x]) << ',' << csv::escape(mixing.categories[y]) << ','
              << format_double(mixing.counts[x][y]) << '\n';
  auto& gap_csv = outputs.file("age_gap.csv");
  gap_csv << "gap,count\n";
  for (auto [gap, count] : gaps.counts) gap_csv << format_double(gap) << ',' << count << '\n';

  json doc{{"attribute", a.attribute},
           {"excluded_missing", same.excluded_missing},
           {"excluded_isolated", same.excluded_isolated},
           {"mixing_total", mixing.total},
           {"mixing_edges_skipped", mixing.edges_skipped},
           {"assortativity", std::isnan(mixing.assortativity) ? json(nullptr) : json(mixing.assortativity)},
           {"age_gap_edges_skipped", gaps.edges_skipped}};
  outputs.file("homophily.json") << doc.dump(2) << '\n';
  manifest.write(outputs);
  outputs.commit();
  out << "nodes profiled " << net.node_count() - same.excluded_missing - same.excluded_isolated
      << ", assortativity " << format_double(mixing.assortativity) << '\n';
  return 0;
}

// ---------------------------------------------------------------- histogram

struct HistogramArgs {
  Common common;
  CascadeInput cascade;
  double bin = 3600.0;
  std::string groups;
  std::string group;
};

void add_histogram(CLI::App& app, HistogramArgs& a) {
  auto* cmd = app.add_subcommand("histogram", "Activation counts per time bin");
  a.common.add(cmd);
  a.cascade.add(cmd);
  cmd->add_option("--bin", a.bin, "Bin width (time units)");
  cmd->add_option("--groups", a.groups, "Group label CSV (id,group)");
  cmd->add_option("--group", a.group, "Restrict to this group (requires --groups)");
}

int run_histogram(const HistogramArgs& a, std::ostream& out, std::ostream&) {
  Manifest manifest("histogram");
  if (a.group.empty() != a.groups.empty()) throw InvalidArgument("--group and --groups go together");
  auto rows = a.cascade.read(a.common.header, manifest);
  // The cascade file alone defines the node set here.
  std::vector<std::string> ids;
  for (const auto& r : rows) ids.push_back(r.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Network nodes = Network::from_edges(ids.size(), {}, ids);
  auto bound = bind_cascade(nodes, rows, a.cascade.horizon(rows));

  std::optional<std::vector<NodeId>> subset;
  if (!a.groups.empty()) {
    auto in = open_input(a.groups);
    manifest.input("groups", a.groups);
    subset.emplace();
    for (const auto& g : read_group_csv(in, a.common.header))
      if (g.group == a.group)
        if (auto node = nodes.find(g.id)) subset->push_back(*node);
  }
  auto hist = subset ? activity_histogram(bound.cascade, a.bin, std::span<const NodeId>(*subset))
                     : activity_histogram(bound.cascade, a.bin);

  auto& p = manifest.doc["parameters"];
  p["bin"] = a.bin;
  p["group"] = a.group;
  p["time_format"] = a.cascade.time_format;
  p["utc_offset"] = a.cascade.utc_offset;

  OutputSet outputs(a.common.out_dir);
  auto& h = outputs.file("histogram.csv");
  h << "bin_start,count\n";
  std::size_t total = 0;
  for (const auto& b : hist) {
    h << format_double(b.start) << ',' << b.count << '\n';
    total += b.count;
  }
  manifest.write(outputs);
  outputs.commit();
  out << hist.size() << " bins, " << total << " activations\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Peer vs. external influence decomposition of activation cascades", "peerinfl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs simulate_args;
  EstimateArgs estimate_args;
  CalibrateArgs calibrate_args;
  RewireArgs rewire_args;
  HomophilyArgs homophily_args;
  HistogramArgs histogram_args;
  add_simulate(app, simulate_args);
  add_estimate(app, estimate_args);
  add_calibrate(app, calibrate_args);
  add_rewire(app, rewire_args);
  add_homophily(app, homophily_args);
  add_histogram(app, histogram_args);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "simulate") return run_simulate(*cmd, simulate_args, out, err);
    if (name == "estimate") return run_estimate(estimate_args, out, err);
    if (name == "calibrate") return run_calibrate(calibrate_args, out, err);
    if (name == "rewire") return run_rewire(rewire_args, out, err);
    if (name == "homophily") return run_homophily(homophily_args, out, err);
    if (name == "histogram") return run_histogram(histogram_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace peerinfl::cli
