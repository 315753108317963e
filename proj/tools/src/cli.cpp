#include "mopc/cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mopc/cli/manifest.hpp"
#include "mopc/errors.hpp"
#include "mopc/io.hpp"
#include "mopc/pathfinder.hpp"
#include "mopc/pool_sim.hpp"
#include "mopc/presets.hpp"
#include "mopc/session_sim.hpp"
#include "mopc/stability.hpp"
#include "mopc/trimming.hpp"

#ifndef MOPC_VERSION
#define MOPC_VERSION "0.0.0"
#endif

namespace mopc::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Pool experiments default to a joint-weight threshold at which the
// eta sweep spans R_E from 0 to nearly 1 on the rich pool.
constexpr double kDefaultPoolTheta = 0.4;
const std::vector<double> kDefaultEtaGrid{0, 5, 10, 20, 30, 40, 60, 80, 100, 120, 150};

std::string num(double v) { return fmt::format("{}", v); }

struct Context {
  std::ostream& out;
  std::ostream& err;
  RunManifest manifest;
  std::string output;
  std::string manifest_out;

  std::string read_input(const fs::path& path) {
    std::string text = io::read_file(path);
    manifest.inputs.push_back({path.string(), sha256_hex(text)});
    return text;
  }

  void write_output(const fs::path& path, const std::string& contents) {
    io::write_file(path, contents);
    manifest.outputs.push_back(path.string());
  }

  void emit(const std::string& csv) {
    if (output.empty()) {
      out << csv;
    } else {
      write_output(output, csv);
    }
  }

  void finish() {
    std::string path = manifest_out;
    if (path.empty() && !output.empty()) path = output + ".manifest.json";
    if (!path.empty()) io::write_file(path, manifest.to_json().dump(2) + "\n");
  }
};

std::uint64_t default_seed() {
  const char* env = std::getenv("MOPC_SEED");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("MOPC_SEED", "not an unsigned integer: " + std::string(env));
  }
}

ResourceWeights resource_weights(const std::vector<double>& rho) {
  if (rho.empty()) return ResourceWeights{};
  if (rho.size() != kResourceKinds) throw ValidationError("rho", "expected 4 weights");
  return ResourceWeights::normalized({rho[0], rho[1], rho[2], rho[3]});
}

ScoreWeights score_weights(const std::vector<double>& beta) {
  if (beta.empty()) return ScoreWeights{};
  if (beta.size() != 3) throw ValidationError("beta", "expected 3 weights");
  ScoreWeights w{beta[0], beta[1], beta[2]};
  w.validate();
  return w;
}

// Default alpha truncated to n_max - 1 unless given explicitly.
TrimConfig trim_config(int n_max, const std::vector<double>& alpha, double theta, double eta) {
  TrimConfig c = TrimConfig::with_max_length(n_max, theta, eta);
  if (!alpha.empty()) c.alpha = alpha;
  c.validate();
  return c;
}

json weights_json(const ResourceWeights& rho, const ScoreWeights& beta) {
  return {{"rho", rho.rho()}, {"beta", {beta.quality, beta.reliability, beta.strategy}}};
}

json trim_json(const TrimConfig& c) {
  return {{"theta", c.theta},   {"eta", c.eta},
          {"alpha", c.alpha},   {"n_max", c.n_max},
          {"include_direct", c.include_direct}, {"direct_weight", c.direct_weight}};
}

WorkerGraph load_graph(Context& ctx, const std::string& path) {
  return io::graph_from_json(io::parse_json(ctx.read_input(path), path));
}

StrategyTable load_strategies(Context& ctx, const std::string& path) {
  return io::strategies_from_json(io::parse_json(ctx.read_input(path), path));
}

// trim

struct TrimArgs {
  std::string graph;
  std::string out;
  double theta = 0.0;
  double eta = 0.0;
  std::vector<double> alpha;
  int n_max = 4;
  std::vector<double> rho;
  bool include_direct = false;
  double direct_weight = 1.0;
  bool length1 = false;
};

void run_trim(Context& ctx, const TrimArgs& a, bool n_max_given) {
  const WorkerGraph graph = load_graph(ctx, a.graph);
  const ResourceWeights rho = resource_weights(a.rho);
  const int n_max = !n_max_given && !a.alpha.empty() ? static_cast<int>(a.alpha.size()) + 1 : a.n_max;
  TrimConfig config = trim_config(n_max, a.alpha, a.theta, a.eta);
  config.include_direct = a.include_direct;
  config.direct_weight = a.direct_weight;

  const TrimResult result =
      a.length1 ? trim_graph_length1(graph, a.theta, rho) : trim_graph(graph, config, rho);
  ctx.manifest.config = {{"graph", a.graph}, {"length1", a.length1}, {"trim", trim_json(config)},
                         {"rho", rho.rho()}};
  if (!a.out.empty()) ctx.write_output(a.out, io::graph_to_json(result.graph).dump(2) + "\n");

  const TrimReport& r = result.report;
  ctx.emit(fmt::format("nodes_before,nodes_after,edges_before,edges_after,R_E\n{},{},{},{},{}\n",
                       r.nodes_before, r.nodes_after, r.edges_before, r.edges_after,
                       num(r.edge_reduction_rate)));
}

// find-path

struct FindPathArgs {
  std::string graph;
  std::string strategies;
  MinRequirements mins;
  double theta = 0.0;
  double eta = 0.0;
  std::vector<double> alpha;
  std::vector<double> rho;
  std::vector<double> beta;
  bool all = false;
};

void run_find_path(Context& ctx, const FindPathArgs& a, bool trim) {
  a.mins.validate();
  const ResourceWeights rho = resource_weights(a.rho);
  const ScoreWeights beta = score_weights(a.beta);
  const WorkerGraph graph = load_graph(ctx, a.graph);
  const StrategyTable table = load_strategies(ctx, a.strategies);

  WorkerGraph work = filter_qualified(graph, a.mins);
  json config = {{"graph", a.graph},
                 {"strategies", a.strategies},
                 {"mins",
                  {{"q_min", a.mins.q_min},
                   {"r_min", a.mins.r_min},
                   {"resource_min", a.mins.resource_min}}},
                 {"weights", weights_json(rho, beta)},
                 {"all", a.all}};
  if (trim) {
    const TrimConfig tc = trim_config(table.max_length(), a.alpha, a.theta, a.eta);
    work = trim_graph(work, tc, rho).graph;
    config["trim"] = trim_json(tc);
  }
  ctx.manifest.config = std::move(config);

  std::vector<PathCandidate> rows;
  if (a.all) {
    rows = all_feasible_paths(work, table, beta);
  } else if (auto best = find_best_pipeline(work, table, beta)) {
    rows.push_back(std::move(*best));
  }
  if (rows.empty()) ctx.err << "no feasible pipeline path\n";

  std::string csv = "strategy,nodes,Q,R,score\n";
  for (const PathCandidate& c : rows) {
    std::string nodes;
    for (NodeId id : c.nodes) {
      if (!nodes.empty()) nodes += ' ';
      nodes += std::to_string(work.node(id).label);
    }
    csv += fmt::format("{},{},{},{},{}\n", c.strategy_index + 1, nodes, num(c.quality),
                       num(c.reliability), num(c.score));
  }
  ctx.emit(csv);
}

// stability

struct StabilityArgs {
  BlockageModel model = presets::measured_blockage();
  std::vector<double> t_grid{0.1, 1.0, 10.0};
  std::vector<int> n_nodes{2};
  std::vector<int> ks{1};
  std::int64_t mc_trials = 0;
  std::uint64_t seed = 1;
};

void run_stability(Context& ctx, const StabilityArgs& a) {
  const auto rows = stability_table(a.model, a.t_grid, a.n_nodes, a.ks, a.mc_trials, a.seed);
  ctx.manifest.seed = a.seed;
  ctx.manifest.config = {{"epsilon", a.model.epsilon}, {"delta_t", a.model.delta_t},
                         {"t_grid", a.t_grid},         {"n_node_list", a.n_nodes},
                         {"k_list", a.ks},             {"mc_trials", a.mc_trials}};
  std::string csv = "T,n_node,K,P_S_formula,P_S_mc,expected_attempts\n";
  for (const StabilityRow& r : rows) {
    csv += fmt::format("{},{},{},{},{},{}\n", num(r.session_time), r.n_node, r.concurrent,
                       num(r.formula), r.monte_carlo ? num(*r.monte_carlo) : "",
                       num(r.expected_attempts));
  }
  ctx.emit(csv);
}

// pool-sim

BetaParams beta_params(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError(field, "expected [a, b]");
  }
  BetaParams p{v[0].get<double>(), v[1].get<double>()};
  p.validate();
  return p;
}

std::vector<double> number_list(const json& doc, const std::string& key,
                                std::vector<double> fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_array()) throw ValidationError(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError(key + "[" + std::to_string(i) + "]", "wrong type");
    out.push_back(v[i].get<double>());
  }
  return out;
}

struct PoolCase {
  std::string name;
  PoolConfig config;
};

std::vector<PoolCase> pool_cases(const json& doc, std::int64_t trials, std::uint64_t seed) {
  if (!doc.contains("cases")) {
    return {{"case1", presets::poor_pool(trials, seed)}, {"case2", presets::rich_pool(trials, seed)}};
  }
  const json& list = doc.at("cases");
  if (!list.is_array() || list.empty()) throw ValidationError("cases", "expected a non-empty array");
  std::vector<PoolCase> cases;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ctx = "cases[" + std::to_string(i) + "]";
    const json& c = list[i];
    PoolCase pc;
    pc.name = io::optional<std::string>(c, "name", ctx, "case" + std::to_string(i + 1));
    pc.config.pool_size = io::required<std::size_t>(c, "pool_size", ctx);
    BetaParams common{1.0, 1.0};
    if (c.contains("beta")) common = beta_params(c.at("beta"), ctx + ".beta");
    pc.config.quality = c.contains("quality") ? beta_params(c.at("quality"), ctx + ".quality") : common;
    pc.config.reliability =
        c.contains("reliability") ? beta_params(c.at("reliability"), ctx + ".reliability") : common;
    pc.config.resource = c.contains("resource") ? beta_params(c.at("resource"), ctx + ".resource") : common;
    pc.config.link_probability = io::optional<double>(c, "link_probability", ctx, 1.0);
    pc.config.trials = trials;
    pc.config.seed = seed;
    pc.config.validate();
    cases.push_back(std::move(pc));
  }
  return cases;
}

MinRequirements pool_mins(const json& doc) {
  MinRequirements m;
  if (!doc.contains("mins")) return m;
  const json& j = doc.at("mins");
  m.q_min = io::optional<double>(j, "q_min", "mins", 0.0);
  m.r_min = io::optional<double>(j, "r_min", "mins", 0.0);
  const std::vector<double> r = number_list(j, "resource_min", {0, 0, 0, 0});
  if (r.size() != kResourceKinds) throw ValidationError("mins.resource_min", "expected 4 numbers");
  m.resource_min = {r[0], r[1], r[2], r[3]};
  m.validate();
  return m;
}

struct PoolSimArgs {
  std::string config;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
};

void run_pool_sim(Context& ctx, const PoolSimArgs& a) {
  const json doc = io::parse_json(ctx.read_input(a.config), a.config);
  if (!doc.is_object()) throw ValidationError(a.config, "expected a JSON object");

  StrategyTable table;
  json strategies_ref = "builtin:lenet";
  if (!doc.contains("strategies")) {
    table = normalize_strategy_table(presets::lenet_strategies_raw());
  } else if (doc.at("strategies").is_string()) {
    fs::path p = doc.at("strategies").get<std::string>();
    if (p.is_relative()) p = fs::path(a.config).parent_path() / p;
    table = load_strategies(ctx, p.string());
    strategies_ref = p.string();
  } else {
    table = io::strategies_from_json(doc.at("strategies"));
    strategies_ref = doc.at("strategies");
  }

  const std::int64_t trials = a.trials ? *a.trials : io::optional<std::int64_t>(doc, "trials", "", 1000);
  const std::uint64_t seed = a.seed ? *a.seed : io::optional<std::uint64_t>(doc, "seed", "", default_seed());
  const std::vector<PoolCase> cases = pool_cases(doc, trials, seed);

  ExperimentSetup setup;
  setup.table = table;
  setup.mins = pool_mins(doc);
  setup.resource_weights = resource_weights(number_list(doc, "rho", {}));
  setup.score_weights = score_weights(number_list(doc, "beta", {}));
  setup.trim = trim_config(table.max_length(), number_list(doc, "alpha", {}),
                           io::optional<double>(doc, "theta", "", kDefaultPoolTheta), 0.0);
  const std::vector<double> grid = number_list(doc, "eta_grid", kDefaultEtaGrid);

  json cases_json = json::array();
  for (const PoolCase& c : cases) {
    cases_json.push_back({{"name", c.name},
                          {"pool_size", c.config.pool_size},
                          {"quality", {c.config.quality.a, c.config.quality.b}},
                          {"reliability", {c.config.reliability.a, c.config.reliability.b}},
                          {"resource", {c.config.resource.a, c.config.resource.b}},
                          {"link_probability", c.config.link_probability}});
  }
  ctx.manifest.seed = seed;
  ctx.manifest.config = {{"strategies", strategies_ref},
                         {"trials", trials},
                         {"cases", cases_json},
                         {"mins",
                          {{"q_min", setup.mins.q_min},
                           {"r_min", setup.mins.r_min},
                           {"resource_min", setup.mins.resource_min}}},
                         {"weights", weights_json(setup.resource_weights, setup.score_weights)},
                         {"trim", trim_json(setup.trim)},
                         {"eta_grid", grid}};

  std::string csv = "case,eta,R_E,S_P,P_P1,top_strategy\n";
  for (const PoolCase& c : cases) {
    for (const SweepPoint& p : sweep_eta(c.config, setup, grid)) {
      const auto top = p.result.top_strategy();
      csv += fmt::format("{},{},{},{},{},{}\n", c.name, num(p.eta), num(p.result.mean_edge_reduction),
                         num(p.result.mean_path_score), num(p.result.p_path_exists),
                         top ? std::to_string(*top + 1) : "");
    }
  }
  ctx.emit(csv);
}

// session-sim

struct SessionArgs {
  std::vector<std::string> specs;
  std::optional<double> monolithic_time;
  std::string events;
};

void run_session_sim(Context& ctx, const SessionArgs& a) {
  std::vector<SessionSpec> specs;
  for (const std::string& path : a.specs) {
    specs.push_back(io::session_spec_from_json(io::parse_json(ctx.read_input(path), path)));
  }
  ctx.manifest.config = {{"specs", a.specs},
                         {"monolithic_time", a.monolithic_time ? json(*a.monolithic_time) : json(nullptr)}};

  std::string csv =
      "spec,workers,completion_time,throughput,overflow_events,timeout_aborted,final_feed_interval,"
      "packages_completed,relative_throughput\n";
  std::string log = "spec,time,event,stage,package,requester_state,worker_state\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SessionTrace t = run_session(specs[i]);
    std::string relative;
    if (a.monolithic_time) {
      if (!(*a.monolithic_time > 0.0)) throw ValidationError("monolithic-time", "must be positive");
      relative = t.timeout_aborted ? "0" : num(*a.monolithic_time / t.completion_time);
    }
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", a.specs[i], specs[i].stages.size(),
                       num(t.completion_time), num(t.steady_state_throughput()), t.overflow_events,
                       t.timeout_aborted ? "true" : "false", num(t.final_feed_interval),
                       t.packages_completed(), relative);
    if (!a.events.empty()) {
      for (const SessionEvent& e : t.events) {
        log += fmt::format("{},{},{},{},{},{},{}\n", a.specs[i], num(e.time), to_string(e.kind),
                           e.stage, e.package, to_string(e.requester),
                           e.stage >= 0 ? to_string(e.worker) : "");
      }
    }
  }
  if (!a.events.empty()) ctx.write_output(a.events, log);
  ctx.emit(csv);
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pipeline path finding, graph trimming, stability and session simulation", "mopc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", MOPC_VERSION);

  std::string output;
  std::string manifest_out;
  app.add_option("-o,--output", output, "Write CSV here instead of stdout");
  app.add_option("--manifest-out", manifest_out,
                 "Run manifest path (default: <output>.manifest.json when -o is given)");

  TrimArgs trim;
  auto* trim_cmd = app.add_subcommand("trim", "Trim a worker graph");
  trim_cmd->add_option("--graph", trim.graph, "Input graph (JSON)")->required();
  trim_cmd->add_option("--out", trim.out, "Write the reduced graph here");
  trim_cmd->add_option("--theta", trim.theta, "Joint link weight threshold");
  trim_cmd->add_option("--eta", trim.eta, "Pair score threshold");
  trim_cmd->add_option("--alpha", trim.alpha, "Weights for A^2..A^n_max")->delimiter(',');
  auto* n_max_opt = trim_cmd->add_option("--n-max", trim.n_max, "Longest strategy length");
  trim_cmd->add_option("--rho", trim.rho, "Resource weights c,m,b,w")->delimiter(',');
  trim_cmd->add_flag("--include-direct", trim.include_direct, "Add direct_weight * A to H");
  trim_cmd->add_option("--direct-weight", trim.direct_weight, "Weight of the A term");
  trim_cmd->add_flag("--length1", trim.length1, "Use the plain rule for length-1 pipelines");

  FindPathArgs find;
  auto* find_cmd = app.add_subcommand("find-path", "Best pipeline path for a strategy table");
  find_cmd->add_option("--graph", find.graph, "Input graph (JSON)")->required();
  find_cmd->add_option("--strategies", find.strategies, "Strategy table (JSON)")->required();
  find_cmd->add_option("--q-min", find.mins.q_min);
  find_cmd->add_option("--r-min", find.mins.r_min);
  find_cmd->add_option("--c-min", find.mins.resource_min[kComputing]);
  find_cmd->add_option("--m-min", find.mins.resource_min[kMemory]);
  find_cmd->add_option("--b-min", find.mins.resource_min[kBuffer]);
  find_cmd->add_option("--w-min", find.mins.resource_min[kBandwidth]);
  find_cmd->add_option("--theta", find.theta, "Joint link weight threshold for trimming");
  auto* find_eta = find_cmd->add_option("--eta", find.eta, "Trim before searching");
  find_cmd->add_option("--alpha", find.alpha)->delimiter(',');
  find_cmd->add_option("--rho", find.rho)->delimiter(',');
  find_cmd->add_option("--beta", find.beta, "Score weights on Q,R,f")->delimiter(',');
  find_cmd->add_flag("--all", find.all, "List every feasible path");

  StabilityArgs stab;
  stab.seed = 0;
  auto* stab_cmd = app.add_subcommand("stability", "Session success probability under blockage");
  stab_cmd->add_option("--epsilon", stab.model.epsilon, "Pr(blocked | clear) per step");
  stab_cmd->add_option("--delta-t", stab.model.delta_t, "Step length in seconds");
  stab_cmd->add_option("--t-grid", stab.t_grid, "Session times in seconds")->delimiter(',');
  stab_cmd->add_option("--n-node-list", stab.n_nodes, "Nodes per pipeline")->delimiter(',');
  stab_cmd->add_option("--k-list", stab.ks, "Concurrent pipelines")->delimiter(',');
  stab_cmd->add_option("--mc-trials", stab.mc_trials, "Monte Carlo trials per grid point");
  auto* stab_seed = stab_cmd->add_option("--seed", stab.seed, "Default: $MOPC_SEED or 1");

  PoolSimArgs pool;
  auto* pool_cmd = app.add_subcommand("pool-sim", "Random pool experiments with an eta sweep");
  pool_cmd->add_option("--config", pool.config, "Experiment config (JSON)")->required();
  pool_cmd->add_option("--trials", pool.trials, "Override trials");
  pool_cmd->add_option("--seed", pool.seed, "Override seed");

  SessionArgs session;
  auto* session_cmd = app.add_subcommand("session-sim", "Discrete-event pipeline session");
  session_cmd->add_option("--spec", session.specs, "Session spec (JSON), repeatable")->required();
  session_cmd->add_option("--monolithic-time", session.monolithic_time,
                          "Single-device time for the same work");
  session_cmd->add_option("--events", session.events, "Write the per-event log here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  Context ctx{out, err, RunManifest{}, output, manifest_out};
  ctx.manifest.version = MOPC_VERSION;
  ctx.manifest.argv.assign(argv, argv + argc);
  try {
    if (trim_cmd->parsed()) {
      ctx.manifest.subcommand = "trim";
      run_trim(ctx, trim, n_max_opt->count() > 0);
    } else if (find_cmd->parsed()) {
      ctx.manifest.subcommand = "find-path";
      run_find_path(ctx, find, find_eta->count() > 0);
    } else if (stab_cmd->parsed()) {
      ctx.manifest.subcommand = "stability";
      if (stab_seed->count() == 0) stab.seed = default_seed();
      run_stability(ctx, stab);
    } else if (pool_cmd->parsed()) {
      ctx.manifest.subcommand = "pool-sim";
      run_pool_sim(ctx, pool);
    } else if (session_cmd->parsed()) {
      ctx.manifest.subcommand = "session-sim";
      run_session_sim(ctx, session);
    }
    ctx.finish();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace mopc::cli
