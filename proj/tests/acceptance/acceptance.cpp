// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// measured values and its wall-clock budget. `acceptance 4 10` runs a subset.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mopc/cli/cli.hpp"
#include "mopc/pathfinder.hpp"
#include "mopc/pool_sim.hpp"
#include "mopc/presets.hpp"
#include "mopc/session_sim.hpp"
#include "mopc/stability.hpp"
#include "mopc/trimming.hpp"
#include "test_graphs.hpp"

namespace {

using namespace mopc;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> check;
};

const BlockageModel kMeasured = presets::measured_blockage();

// Stability

Outcome closed_form() {
  constexpr double kShortTarget = 0.999307;
  constexpr double kShortTol = 1e-6;
  constexpr double kLongTarget = 0.8106;
  constexpr double kLongTol = 5e-4;
  const double p_short = success_probability_multi({3.3e-3, 2, 1}, kMeasured);
  const double p_long = success_probability_multi({1.0, 2, 1}, kMeasured);

  // Same row through the command line front end.
  const char* argv[] = {"mopc",  "stability", "--epsilon",     "6.93e-4", "--delta-t", "0.0033",
                        "--t-grid", "0.0033,1", "--n-node-list", "2",       "--k-list",  "1"};
  std::ostringstream out, err;
  const int code = cli::parse_and_dispatch(static_cast<int>(std::size(argv)), argv, out, err);
  std::vector<double> cli_values;
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() >= 4) cli_values.push_back(std::stod(cells[3]));
  }
  const bool cli_ok = code == 0 && cli_values.size() == 2 && cli_values[0] == p_short &&
                      cli_values[1] == p_long;

  const bool pass = std::abs(p_short - kShortTarget) <= kShortTol &&
                    std::abs(p_long - kLongTarget) <= kLongTol && cli_ok;
  return {pass, fmt::format("P_S(3.3ms,2,1)={:.9f} (target {} +/- {}), P_S(1s,2,1)={:.9f} "
                            "(target {} +/- {}), cli={}",
                            p_short, kShortTarget, kShortTol, p_long, kLongTarget, kLongTol,
                            cli_ok ? "match" : "mismatch")};
}

Outcome monte_carlo_agreement() {
  constexpr std::int64_t kTrials = 100000;
  constexpr double kTol = 0.01;
  const auto rows = stability_table(kMeasured, {0.1, 1.0, 10.0}, {2, 4, 6}, {1, 2, 4}, kTrials, 2024);
  double worst_single = 0.0, worst_multi = 0.0;
  for (const StabilityRow& r : rows) {
    const double gap = std::abs(*r.monte_carlo - r.formula);
    (r.concurrent == 1 ? worst_single : worst_multi) = std::max(r.concurrent == 1 ? worst_single : worst_multi, gap);
  }
  return {worst_single <= kTol && worst_multi <= kTol,
          fmt::format("{} grid points x {} trials, max |MC - formula|: K=1 {:.5f}, K in {{2,4}} "
                      "{:.5f} (tol {})",
                      rows.size(), kTrials, worst_single, worst_multi, kTol)};
}

Outcome ordering() {
  const std::vector<double> ts{0.01, 0.1, 0.5, 1, 2, 5, 10};
  const std::vector<int> ns{2, 3, 4, 5, 6};
  const std::vector<int> ks{1, 2, 3, 4};
  int checks = 0, violations = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++violations;
  };
  for (double t : ts) {
    for (int n : ns) {
      for (int k : ks) {
        const StabilityQuery q{t, n, k};
        const double p = success_probability_multi(q, kMeasured);
        expect(expected_attempts(q, kMeasured) == 1.0 / p);
        if (t != ts.back()) {
          const double next_t = *std::next(std::find(ts.begin(), ts.end(), t));
          expect(success_probability_multi({next_t, n, k}, kMeasured) < p);
        }
        if (n != ns.back()) expect(success_probability_multi({t, n + 1, k}, kMeasured) < p);
        if (k != ks.back()) expect(success_probability_multi({t, n, k + 1}, kMeasured) > p);
      }
    }
  }
  return {violations == 0, fmt::format("{} ordering/identity checks, {} violations", checks, violations)};
}

// Path finding

struct RandomCase {
  WorkerGraph graph;
  StrategyTable table;
};

std::vector<RandomCase> random_cases() {
  std::vector<RandomCase> cases;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const double density = 0.25 + 0.1 * static_cast<double>(seed % 7);
    const double ceiling = 0.05 + 0.1 * static_cast<double>(seed % 6);
    cases.push_back({testing::random_graph(seed, 2, 10, density),
                     testing::random_table(seed + 5000, 4, ceiling)});
  }
  return cases;
}

Outcome oracle_equivalence() {
  int found = 0, mismatches = 0;
  const auto cases = random_cases();
  for (const RandomCase& c : cases) {
    const auto got = find_best_pipeline(c.graph, c.table, ScoreWeights{});
    const auto want = testing::oracle_best_pipeline(c.graph, c.table, ScoreWeights{});
    if (got.has_value() != want.has_value()) {
      ++mismatches;
      continue;
    }
    if (!got) continue;
    ++found;
    if (got->score != want->score || got->nodes != want->nodes ||
        got->strategy_index != want->strategy_index) {
      ++mismatches;
    }
  }
  return {mismatches == 0 && found >= 100,
          fmt::format("{} graphs (M <= 10, n_i <= 4), {} with a feasible path, {} mismatches",
                      cases.size(), found, mismatches)};
}

Outcome six_leaf_structure() {
  const WorkerGraph g = testing::six_leaf_cohort();
  const ForwardSearchResult f = forward_search(g, g.requester(), 3);
  const std::size_t leaves = f.branches.back().size();
  const std::size_t paths = backward_trace(f.branches, g, g.requester()).size();
  return {leaves == 6 && paths == 6,
          fmt::format("depth-3 branches {} (want 6), traced paths {} (want 6)", leaves, paths)};
}

Outcome walk_counts() {
  int entries = 0, mismatches = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const WorkerGraph g = testing::random_graph(seed + 900, 1, 8, 0.5);
    const CountMatrix a = adjacency_matrix(g, 0.0, ResourceWeights{});
    for (int n = 1; n <= 4; ++n) {
      const CountMatrix p = matrix_power(a, n);
      for (NodeId s = 0; s < g.node_count(); ++s) {
        for (NodeId t = 0; t < g.node_count(); ++t) {
          ++entries;
          if (p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) !=
              testing::count_walks_dfs(g, s, t, n)) {
            ++mismatches;
          }
        }
      }
    }
  }
  return {mismatches == 0, fmt::format("50 graphs, {} entries compared, {} mismatches", entries, mismatches)};
}

Outcome complexity_bound() {
  std::uint64_t worst_ratio_num = 0, worst_ratio_den = 1;
  int violations = 0;
  const auto cases = random_cases();
  for (const RandomCase& c : cases) {
    SearchStats stats;
    find_best_pipeline(c.graph, c.table, ScoreWeights{}, &stats);
    const std::uint64_t m = c.graph.node_count();
    const std::uint64_t bound =
        c.table.strategies.size() * static_cast<std::uint64_t>(c.table.max_length()) * m * (m - 1);
    if (stats.forward_edge_checks > bound) ++violations;
    if (bound > 0 && stats.forward_edge_checks * worst_ratio_den > worst_ratio_num * bound) {
      worst_ratio_num = stats.forward_edge_checks;
      worst_ratio_den = bound;
    }
  }
  return {violations == 0,
          fmt::format("{} graphs, {} bound violations, peak checks/bound = {}/{}", cases.size(),
                      violations, worst_ratio_num, worst_ratio_den)};
}

// Pool experiments

constexpr std::int64_t kPoolTrials = 1000;
constexpr std::uint64_t kPoolSeed = 20240601;
constexpr double kTheta = 0.4;
const std::vector<double> kEtaGrid{0, 5, 10, 20, 30, 40, 60, 80, 100, 120, 150};

ExperimentSetup lenet_setup() {
  ExperimentSetup s;
  s.table = normalize_strategy_table(presets::lenet_strategies_raw());
  s.trim = TrimConfig::with_max_length(s.table.max_length(), kTheta, 0.0);
  return s;
}

Outcome trimming_negligible() {
  constexpr double kMaxReduction = 0.20;
  constexpr double kMaxExistenceDrop = 0.05;
  constexpr double kMaxScoreDrop = 0.02;
  const ExperimentSetup setup = lenet_setup();
  const PoolConfig rich = presets::rich_pool(kPoolTrials, kPoolSeed);
  const ExperimentResult base = run_experiment(rich, setup, false);
  const auto sweep = sweep_eta(rich, setup, kEtaGrid);

  bool ok = true;
  int qualifying = 0;
  std::string points;
  for (const SweepPoint& p : sweep) {
    const double re = p.result.mean_edge_reduction;
    const double dp = base.p_path_exists - p.result.p_path_exists;
    const double ds = std::abs(base.mean_path_score - p.result.mean_path_score);
    points += fmt::format(" eta={}:R_E={:.3f},dP={:.3f},dS={:.4f}", p.eta, re, dp, ds);
    if (re <= kMaxReduction) {
      if (re > 0.0) ++qualifying;
      if (dp > kMaxExistenceDrop || ds > kMaxScoreDrop) ok = false;
    }
  }

  const ExperimentResult poor = run_experiment(presets::poor_pool(kPoolTrials, kPoolSeed), setup, false);
  const bool ordering =
      poor.mean_path_score < base.mean_path_score && poor.p_path_exists < base.p_path_exists;
  return {ok && ordering && qualifying > 0,
          fmt::format("case2 untrimmed S_P={:.4f} P_P1={:.3f}; case1 S_P={:.4f} P_P1={:.3f}; "
                      "{} trimmed points with 0 < R_E <= {};{}",
                      base.mean_path_score, base.p_path_exists, poor.mean_path_score,
                      poor.p_path_exists, qualifying, kMaxReduction, points)};
}

Outcome winning_strategy() {
  constexpr std::size_t kExpectedWinner = 5;  // strategy 6, zero-based
  const ExperimentResult r =
      run_experiment(presets::rich_pool(kPoolTrials, kPoolSeed), lenet_setup(), false);
  std::string histogram;
  for (std::size_t i = 0; i < r.winning_strategy_histogram.size(); ++i) {
    histogram += fmt::format(" s{}={}", i + 1, r.winning_strategy_histogram[i]);
  }
  const auto top = r.top_strategy();
  return {top == kExpectedWinner,
          fmt::format("plurality winner: strategy {} (want 6); wins:{}",
                      top ? std::to_string(*top + 1) : "none", histogram)};
}

// Sessions

SessionSpec serialized_pipeline(const std::vector<std::pair<double, double>>& stages,
                                std::int64_t packages) {
  SessionSpec s;
  for (const auto& [process, transfer] : stages) s.stages.push_back({process, 1000000, transfer});
  s.n_packages = packages;
  s.initial_feed_interval = 1e-6;
  s.timeout = 1e6;
  s.serialize_transfer = true;
  return s;
}

Outcome throughput_trend() {
  constexpr std::int64_t kPackages = 1000;
  constexpr double kSpeedupTol = 0.02;
  // Total compute 5.0 per package split over 1..3 devices; hand-offs between
  // workers cost 1.0 and the final return to the requester 0.4.
  const SessionSpec mono = serialized_pipeline({{5.0, 0.4}}, kPackages);
  const SessionSpec two = serialized_pipeline({{2.6, 1.0}, {2.6, 0.4}}, kPackages);
  const SessionSpec three = serialized_pipeline({{1.8, 1.0}, {1.8, 1.0}, {1.8, 0.4}}, kPackages);
  const double mono_time = run_session(mono).completion_time;
  const auto rows = compare_partitions(mono_time, {mono, two, three});
  const double t1 = rows[0].relative_throughput, t2 = rows[1].relative_throughput,
               t3 = rows[2].relative_throughput;
  const bool trend = t1 == 1.0 && t1 < t2 && t2 < t3 && t3 / t1 > 1.0 && t3 / t1 <= 3.0;

  bool balanced = true;
  std::string speedups;
  const double work = 6.0;
  const SessionTrace single = run_session(serialized_pipeline({{work, 0.0}}, kPackages));
  for (int k : {2, 3}) {
    SessionSpec split;
    split.n_packages = kPackages;
    split.initial_feed_interval = 1e-6;
    split.timeout = 1e6;
    for (int i = 0; i < k; ++i) split.stages.push_back({work / k, 1000000, 0.0});
    const SessionTrace t = run_session(split);
    const double steady = t.steady_state_throughput() / single.steady_state_throughput();
    const double overall = single.completion_time / t.completion_time;
    balanced = balanced && std::abs(steady - k) <= kSpeedupTol * k &&
               std::abs(overall - k) <= kSpeedupTol * k;
    speedups += fmt::format(" k={}: steady {:.4f}, end-to-end {:.4f};", k, steady, overall);
  }
  return {trend && balanced,
          fmt::format("relative throughput 1/2/3 workers = {:.1f}%/{:.1f}%/{:.1f}%; zero-comm "
                      "speedup (tol {}%):{}",
                      100 * t1, 100 * t2, 100 * t3, 100 * kSpeedupTol, speedups)};
}

std::vector<Criterion> criteria() {
  return {
      {1, "stability closed form at measured blockage constants", 1.0, closed_form},
      {2, "Monte Carlo agrees with closed forms", 30.0, monte_carlo_agreement},
      {3, "stability ordering and expected attempts", 1.0, ordering},
      {4, "best pipeline equals exhaustive oracle", 10.0, oracle_equivalence},
      {5, "seven-node cohort: six leaves, six paths", 1.0, six_leaf_structure},
      {6, "matrix powers equal walk counts", 5.0, walk_counts},
      {7, "trimming below 20% edge reduction is negligible; poor pool scores lower", 300.0,
       trimming_negligible},
      {8, "strategy 6 wins the rich-pool plurality", 300.0, winning_strategy},
      {9, "pipeline throughput trend and balanced speedup", 10.0, throughput_trend},
      {10, "forward search edge checks within I*n_max*M(M-1)", 10.0, complexity_bound},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failed = 0, ran = 0;
  for (const Criterion& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o = c.check();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  criterion %2d  %s  [%.2fs / %.0fs%s]\n    %s\n", pass ? "PASS" : "FAIL", c.id,
                c.title, elapsed, c.budget_seconds, in_time ? "" : ", over budget",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 && ran > 0 ? 0 : 1;
}
