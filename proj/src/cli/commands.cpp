#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "tvnet/csv.hpp"
#include "tvnet/errors.hpp"
#include "tvnet/gossip.hpp"
#include "tvnet/hard_instances.hpp"
#include "tvnet/optimizers.hpp"
#include "tvnet/problems.hpp"
#include "tvnet/topology.hpp"

namespace tvnet::cli {
namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  write(file);
  if (!file) throw DataError("write to '" + path + "' failed");
}

int parse_int(const std::string& text, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(what) + " must be an integer or 'auto', got '" + text + "'");
  return v;
}

double parse_real(const std::string& text, const char* what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(what) + " must be a number or 'auto', got '" + text + "'");
  return v;
}

NodeSet group_or_last(const std::string& text, int n) {
  if (text.empty()) return {n - 1};
  return parse_node_set(text);
}

std::vector<NodeSet> parse_center_list(const std::string& text) {
  std::vector<NodeSet> sets;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) sets.push_back(parse_node_set(item));
  if (sets.empty()) throw ConfigError("sun-cycle topology needs --centers, e.g. \"1;2;3\"");
  return sets;
}

struct BuiltTopology {
  TopologySequence sequence;
  WeightSchedule weights;
};

BuiltTopology build_topology(const TopologyOptions& t, std::uint64_t seed) {
  if (t.n < 1) throw ConfigError("n must be positive");
  if (t.kind == "static-complete") {
    auto seq = TopologySequence::fixed(complete_graph(t.n));
    return {seq, WeightSchedule::from_sequence(seq, t.delta)};
  }
  if (t.kind == "sun-cycle") {
    auto seq = TopologySequence::sun_cycle(t.n, parse_center_list(t.centers));
    return {seq, WeightSchedule::from_sequence(seq, t.delta)};
  }
  if (t.kind == "random-sun") {
    auto seq = TopologySequence::random_sun(t.n, t.center_size, seed);
    return {seq, WeightSchedule::from_sequence(seq, t.delta)};
  }
  if (t.kind == "constructed") {
    const auto c = build_sun_sequence(t.n, t.beta, parse_node_set(t.group_a), group_or_last(t.group_b, t.n));
    return {c.sequence, WeightSchedule::from_construction(c)};
  }
  throw ConfigError("unknown topology '" + t.kind + "' (static-complete, sun-cycle, random-sun, constructed)");
}

void add_topology_options(CLI::App* app, TopologyOptions& t) {
  app->add_option("--n", t.n, "Number of nodes")->capture_default_str();
  app->add_option("--topology", t.kind, "static-complete | sun-cycle | random-sun | constructed")->capture_default_str();
  app->add_option("--centers", t.centers, "sun-cycle center sets, ';'-separated (1-based)");
  app->add_option("--center-size", t.center_size, "random-sun center set size")->capture_default_str();
  app->add_option("--delta", t.delta, "Laplacian step for sun graphs, in (0, 1]")->capture_default_str();
  app->add_option("--beta", t.beta, "constructed-sequence connectivity target")->capture_default_str();
  app->add_option("--I1", t.group_a, "constructed-sequence first node group (1-based)")->capture_default_str();
  app->add_option("--I2", t.group_b, "constructed-sequence second node group (default: node n)");
}

void add_common_options(CLI::App* app, std::uint64_t& seed, std::string& out, long& record_every) {
  app->add_option("--seed", seed, "Random seed")->capture_default_str();
  app->add_option("--out", out, "Output file (default: stdout)");
  app->add_option("--record-every", record_every, "Record cadence")->capture_default_str()->check(CLI::PositiveNumber);
}

void echo_topology(HeaderEntries& h, const TopologyOptions& t) {
  h.emplace_back("n", std::to_string(t.n));
  h.emplace_back("topology", t.kind);
  h.emplace_back("centers", t.centers);
  h.emplace_back("center-size", std::to_string(t.center_size));
  h.emplace_back("delta", shortest(t.delta));
  h.emplace_back("beta", shortest(t.beta));
  h.emplace_back("I1", t.group_a);
  h.emplace_back("I2", t.group_b);
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Algorithm algo = parse_algorithm(cfg.algo);
    if (cfg.K < 0) throw ConfigError("K must be nonnegative");
    if (cfg.samples < 2 || cfg.dim < 1 || cfg.batch < 0) throw ConfigError("samples, dim and batch out of range");
    if (cfg.init != "average" && cfg.init != "gossip") throw ConfigError("init must be 'average' or 'gossip'");
    if (cfg.synthetic && !cfg.data.empty()) throw ConfigError("--synthetic and --data are mutually exclusive");

    BuiltTopology topo = build_topology(cfg.topology, cfg.seed);
    const int n = topo.weights.n();

    Dataset data;
    if (!cfg.data.empty()) {
      RelabelMap map;
      LibsvmOptions opts;
      if (!cfg.relabel.empty()) {
        map = parse_relabel(cfg.relabel);
        opts.relabel = &map;
      }
      data = load_libsvm(cfg.data, opts);
      if (data.size() == 0) throw DataError("dataset '" + cfg.data + "' has no usable samples");
      if (cfg.scale) scale_max_abs(data);
    } else {
      data = synthetic_dataset(static_cast<std::size_t>(cfg.samples), static_cast<std::size_t>(cfg.dim), cfg.seed,
                               cfg.separation);
    }
    LogisticProblem problem(partition_heterogeneous(data, n, cfg.skew, cfg.seed), cfg.rho,
                            static_cast<std::size_t>(cfg.batch));

    const Vector x0(problem.dim(), 0.0);
    const double L = problem.smoothness_estimate();
    const double Delta = problem.value(x0);
    double sigma2 = 0.0;
    if (cfg.sigma2 != "auto")
      sigma2 = parse_real(cfg.sigma2, "sigma2");
    else if (cfg.batch != 0)
      sigma2 = problem.estimate_sigma2(x0, 256, cfg.seed);
    if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be nonnegative");
    const double sigma = std::sqrt(sigma2);
    const double beta = topo.weights.beta();

    int R = 1;
    if (algo == Algorithm::MCDSGT) {
      R = cfg.R == "auto" ? auto_R(beta, n, L, Delta, static_cast<double>(std::max(cfg.K, 1L)), sigma)
                          : parse_int(cfg.R, "R");
      if (R < 1) throw ConfigError("R must be at least 1");
    }
    double gamma = 0.0;
    if (cfg.gamma == "auto")
      gamma = auto_gamma(L, Delta, sigma, std::pow(beta, R), R, cfg.K);
    else
      gamma = parse_real(cfg.gamma, "gamma");

    AlgoConfig ac;
    ac.algo = algo;
    ac.gamma = gamma;
    ac.R = R;
    ac.K = cfg.K;
    ac.seed = cfg.seed;
    ac.record_every = cfg.record_every;
    ac.init = cfg.init == "gossip" ? TrackerInit::Decentralized : TrackerInit::ExactAverage;
    const RunRecord record = run_algorithm(problem, topo.weights, ac, x0);

    HeaderEntries h;
    h.emplace_back("command", "run");
    h.emplace_back("algo", to_string(algo));
    echo_topology(h, cfg.topology);
    h.emplace_back("R", cfg.R);
    h.emplace_back("gamma", cfg.gamma);
    h.emplace_back("K", std::to_string(cfg.K));
    h.emplace_back("init", cfg.init);
    h.emplace_back("data", cfg.data);
    h.emplace_back("relabel", cfg.relabel);
    h.emplace_back("scale", cfg.scale ? "true" : "false");
    h.emplace_back("synthetic", cfg.synthetic ? "true" : "false");
    h.emplace_back("samples", std::to_string(cfg.samples));
    h.emplace_back("dim", std::to_string(cfg.dim));
    h.emplace_back("separation", shortest(cfg.separation));
    h.emplace_back("skew", shortest(cfg.skew));
    h.emplace_back("rho", shortest(cfg.rho));
    h.emplace_back("batch", std::to_string(cfg.batch));
    h.emplace_back("sigma2", cfg.sigma2);
    h.emplace_back("seed", std::to_string(cfg.seed));
    h.emplace_back("record-every", std::to_string(cfg.record_every));
    h.emplace_back("resolved.gamma", format_real(gamma));
    h.emplace_back("resolved.R", std::to_string(R));
    h.emplace_back("resolved.L", format_real(L));
    h.emplace_back("resolved.Delta", format_real(Delta));
    h.emplace_back("resolved.sigma2", format_real(sigma2));
    h.emplace_back("resolved.beta", format_real(beta));
    h.emplace_back("resolved.samples_per_node", std::to_string(problem.shard(0).size()));
    emit(cfg.out, out, [&](std::ostream& os) { write_run_csv(os, record, h); });
    return static_cast<int>(kOk);
  });
}

int cmd_graph(const GraphConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.n < 2) throw ConfigError("n must be at least 2");
    if (cfg.export_rounds < 0) throw ConfigError("export-rounds must be nonnegative");
    const auto c = build_sun_sequence(cfg.n, cfg.beta, parse_node_set(cfg.group_a), group_or_last(cfg.group_b, cfg.n));
    const auto schedule = WeightSchedule::from_construction(c);
    const Rounds measured = effective_distance(c.sequence, c.group_a, c.group_b);

    std::ostringstream os;
    os << "n=" << c.n << '\n'
       << "beta=" << shortest(c.beta) << '\n'
       << "I1=" << format_node_set(c.group_a) << '\n'
       << "I2=" << format_node_set(c.group_b) << '\n'
       << "k=" << c.k << '\n'
       << "delta=" << format_real(c.delta) << '\n'
       << "case=" << (c.uniform_weights ? "complete" : "cycling") << '\n'
       << "p=" << c.center_sets.size() << '\n'
       << "period=" << schedule.period() << '\n';
    bool all_ok = true;
    for (long t = 0; t < schedule.period(); ++t) {
      const WeightMatrix& w = schedule.at(t);
      const WeightReport rep = verify_weight(w.entries, c.sequence.graph_at(t), c.beta, 1e-10);
      all_ok = all_ok && rep.ok();
      const auto centers = c.sequence.centers_at(t);
      os << "round " << t << ": centers=" << (centers ? format_node_set(*centers) : format_node_set(all_nodes(c.n)))
         << " beta_hat=" << format_real(rep.measured_beta) << " weights=" << (rep.ok() ? "ok" : "FAIL") << '\n';
    }
    os << "predicted_distance=" << c.predicted_distance << '\n'
       << "measured_distance=" << (measured ? std::to_string(*measured) : "unreachable") << '\n';
    if (cfg.export_rounds > 0) os << c.sequence.export_centers(cfg.export_rounds);
    emit(cfg.out, out, [&](std::ostream& dst) { dst << os.str(); });
    return static_cast<int>(all_ok && measured == c.predicted_distance ? kOk : kAuditFailed);
  });
}

int cmd_diameter(const DiameterConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BuiltTopology topo = build_topology(cfg.topology, cfg.seed);
    DistanceOptions opts;
    if (cfg.order == "nested")
      opts.order = ExpansionOrder::Nested;
    else if (cfg.order != "forward")
      throw ConfigError("order must be 'forward' or 'nested'");
    if (cfg.cap < 0 || cfg.window < 0) throw ConfigError("cap and window must be nonnegative");
    opts.cap = cfg.cap;
    opts.start_window = cfg.window;
    if (cfg.from.empty() != cfg.to.empty()) throw ConfigError("--from and --to go together");

    std::ostringstream os;
    Rounds r;
    if (!cfg.from.empty()) {
      r = effective_distance(topo.sequence, parse_node_set(cfg.from), parse_node_set(cfg.to), opts);
      os << "effective_distance=";
    } else {
      r = effective_diameter(topo.sequence, opts);
      os << "effective_diameter=";
    }
    os << (r ? std::to_string(*r) : "unreachable") << '\n';
    emit(cfg.out, out, [&](std::ostream& dst) { dst << os.str(); });
    return static_cast<int>(kOk);
  });
}

int cmd_hardlb(const HardlbConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Algorithm algo = parse_algorithm(cfg.algo);
    if (cfg.T < 0) throw ConfigError("T must be nonnegative");
    const zero_chain::Instance2Spec spec = zero_chain::make_instance2(cfg.L, cfg.Delta, cfg.n, cfg.beta, cfg.T);
    const zero_chain::Instance2Problem problem(spec);
    const WeightSchedule weights = WeightSchedule::from_construction(spec.construction);

    const int R = algo == Algorithm::MCDSGT ? cfg.R : 1;
    if (R < 1) throw ConfigError("R must be at least 1");
    const long init_rounds = algo == Algorithm::DSGD ? 0 : R;
    const long per_round = algo == Algorithm::DSGD ? 1 : 2L * R;
    const long K = cfg.T >= init_rounds ? (cfg.T - init_rounds) / per_round : 0;
    const double gamma = cfg.gamma == "auto"
                             ? auto_gamma(cfg.L, cfg.Delta, 0.0, std::pow(weights.beta(), R), R, K)
                             : parse_real(cfg.gamma, "gamma");

    std::vector<int> trace(static_cast<std::size_t>(cfg.T) + 1, 0);
    long last_round = 0;
    const StateObserver observer = [&](const NodeStates& s) {
      if (s.comm_rounds > cfg.T) return;
      const int p = std::max({zero_chain::prog(s.X), zero_chain::prog(s.H), zero_chain::prog(s.Gacc)});
      auto& slot = trace[static_cast<std::size_t>(s.comm_rounds)];
      slot = std::max(slot, p);
      last_round = std::max(last_round, s.comm_rounds);
    };

    AlgoConfig ac;
    ac.algo = algo;
    ac.gamma = gamma;
    ac.R = R;
    ac.K = K;
    ac.seed = cfg.seed;
    ac.record_every = K + 1;
    ac.init = TrackerInit::Decentralized;
    run_algorithm(problem, weights, ac, {}, observer);

    trace.resize(static_cast<std::size_t>(last_round) + 1);
    zero_chain::ProgressionReport report = zero_chain::audit_progression(trace, spec.distance);
    const zero_chain::ProgressionReport full = report;
    std::erase_if(report.rows, [&](const zero_chain::ProgressionRow& r) {
      return r.comm_rounds % cfg.record_every != 0 && r.comm_rounds != last_round;
    });

    HeaderEntries h;
    h.emplace_back("command", "hardlb");
    h.emplace_back("n", std::to_string(cfg.n));
    h.emplace_back("beta", shortest(cfg.beta));
    h.emplace_back("algo", to_string(algo));
    h.emplace_back("T", std::to_string(cfg.T));
    h.emplace_back("R", std::to_string(cfg.R));
    h.emplace_back("gamma", cfg.gamma);
    h.emplace_back("L", shortest(cfg.L));
    h.emplace_back("Delta", shortest(cfg.Delta));
    h.emplace_back("seed", std::to_string(cfg.seed));
    h.emplace_back("record-every", std::to_string(cfg.record_every));
    h.emplace_back("resolved.gamma", format_real(gamma));
    h.emplace_back("resolved.R", std::to_string(R));
    h.emplace_back("resolved.K", std::to_string(K));
    h.emplace_back("resolved.d", std::to_string(spec.d));
    h.emplace_back("resolved.lambda", format_real(spec.lambda));
    h.emplace_back("resolved.I1", format_node_set(spec.group_a));
    h.emplace_back("resolved.I2", format_node_set(spec.group_b));
    emit(cfg.out, out, [&](std::ostream& os) { write_progression_csv(os, report, h); });
    return static_cast<int>(full.ok() ? kOk : kAuditFailed);
  });
}

int run_main(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized stochastic optimization over time-varying sun-graph networks", "tvnet"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  ExperimentConfig run_cfg;
  auto* run = app.add_subcommand("run", "Run DSGD, DSGT or MC-DSGT on a logistic-regression problem");
  run->add_option("--algo", run_cfg.algo, "dsgd | dsgt | mcdsgt")->capture_default_str();
  add_topology_options(run, run_cfg.topology);
  run->add_option("--R", run_cfg.R, "Consensus/accumulation rounds, or 'auto'")->capture_default_str();
  run->add_option("--gamma", run_cfg.gamma, "Step size, or 'auto'")->capture_default_str();
  run->add_option("--K", run_cfg.K, "Outer rounds")->capture_default_str();
  run->add_option("--init", run_cfg.init, "Tracker start: average | gossip")->capture_default_str();
  run->add_option("--data", run_cfg.data, "LIBSVM dataset (synthetic data when omitted)");
  run->add_option("--relabel", run_cfg.relabel, "Label map, e.g. 2:+1,4:-1");
  run->add_flag("--scale", run_cfg.scale, "Scale LIBSVM features by column max-abs");
  run->add_option("--sigma2", run_cfg.sigma2, "Oracle variance for the schedules, or 'auto'")->capture_default_str();
  run->add_flag("--synthetic", run_cfg.synthetic, "Use the synthetic two-cluster dataset");
  run->add_option("--samples", run_cfg.samples, "Synthetic sample count")->capture_default_str();
  run->add_option("--dim", run_cfg.dim, "Synthetic feature dimension")->capture_default_str();
  run->add_option("--separation", run_cfg.separation, "Synthetic cluster separation")->capture_default_str();
  run->add_option("--skew", run_cfg.skew, "Label skew of the partition, in [0.5, 1]")->capture_default_str();
  run->add_option("--rho", run_cfg.rho, "Non-convex regularizer weight")->capture_default_str();
  run->add_option("--batch", run_cfg.batch, "Minibatch size (0 = full batch)")->capture_default_str();
  add_common_options(run, run_cfg.seed, run_cfg.out, run_cfg.record_every);

  GraphConfig graph_cfg;
  auto* graph = app.add_subcommand("graph", "Build and check the sun-graph sequence for (n, beta, I1, I2)");
  graph->add_option("--n", graph_cfg.n, "Number of nodes")->capture_default_str();
  graph->add_option("--beta", graph_cfg.beta, "Connectivity target")->capture_default_str();
  graph->add_option("--I1", graph_cfg.group_a, "First node group (1-based)")->capture_default_str();
  graph->add_option("--I2", graph_cfg.group_b, "Second node group (default: node n)");
  graph->add_option("--export-rounds", graph_cfg.export_rounds, "Also list the centers of this many rounds");
  add_common_options(graph, graph_cfg.seed, graph_cfg.out, graph_cfg.record_every);

  DiameterConfig diam_cfg;
  auto* diam = app.add_subcommand("diameter", "Effective diameter (or distance) of a topology sequence");
  add_topology_options(diam, diam_cfg.topology);
  diam->add_option("--order", diam_cfg.order, "forward | nested")->capture_default_str();
  diam->add_option("--cap", diam_cfg.cap, "Round cap (0 = automatic)");
  diam->add_option("--window", diam_cfg.window, "Start rounds to minimize over (0 = automatic)");
  diam->add_option("--from", diam_cfg.from, "Source group (1-based)");
  diam->add_option("--to", diam_cfg.to, "Target group (1-based)");
  add_common_options(diam, diam_cfg.seed, diam_cfg.out, diam_cfg.record_every);

  HardlbConfig hard_cfg;
  auto* hard = app.add_subcommand("hardlb", "Audit information progress on the split zero-chain instance");
  hard->add_option("--n", hard_cfg.n, "Number of nodes (>= 4)")->capture_default_str();
  hard->add_option("--beta", hard_cfg.beta, "Connectivity")->capture_default_str();
  hard->add_option("--algo", hard_cfg.algo, "dsgd | dsgt | mcdsgt")->capture_default_str();
  hard->add_option("--T", hard_cfg.T, "Communication-round budget")->capture_default_str();
  hard->add_option("--R", hard_cfg.R, "MC-DSGT rounds")->capture_default_str();
  hard->add_option("--gamma", hard_cfg.gamma, "Step size, or 'auto'")->capture_default_str();
  hard->add_option("--L", hard_cfg.L, "Smoothness")->capture_default_str();
  hard->add_option("--Delta", hard_cfg.Delta, "Initial gap")->capture_default_str();
  add_common_options(hard, hard_cfg.seed, hard_cfg.out, hard_cfg.record_every);

  for (auto* sub : {run, graph, diam, hard})
    sub->add_option("--config", config_path, "Read key=value settings (e.g. the header of an earlier output)");

  // --config is expanded here: its entries go in front of the explicit flags
  // so that flags given on the command line win.
  std::vector<std::string> args = args_in;
  try {
    if (args.size() > 2) {
      CLI::App* sub = nullptr;
      for (auto* s : {run, graph, diam, hard})
        if (s->get_name() == args[1]) sub = s;
      std::vector<std::string> file_args;
      for (std::size_t i = 2; sub != nullptr && i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
          path = args[i + 1];
          args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        } else if (args[i].starts_with("--config=")) {
          path = args[i].substr(9);
          args.erase(args.begin() + static_cast<long>(i));
        } else {
          continue;
        }
        --i;
        for (const auto& [key, value] : read_header_config(path)) {
          if (key == "config" || key == "out" || key == "help") continue;
          if (sub->get_option_no_throw("--" + key) == nullptr) continue;
          if (value.empty()) continue;
          file_args.push_back("--" + key + "=" + value);
        }
      }
      args.insert(args.begin() + 2, file_args.begin(), file_args.end());
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kConfigError);
  }

  if (run->parsed()) return cmd_run(run_cfg, out, err);
  if (graph->parsed()) return cmd_graph(graph_cfg, out, err);
  if (diam->parsed()) return cmd_diameter(diam_cfg, out, err);
  return cmd_hardlb(hard_cfg, out, err);
}

}  // namespace tvnet::cli
