#include "mopc/pool_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include <boost/random/beta_distribution.hpp>

#include "mopc/errors.hpp"

namespace mopc {

void BetaParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("beta", "a and b must be positive");
}

void PoolConfig::validate() const {
  if (pool_size < 2) throw ValidationError("pool_size", "must be >= 2");
  quality.validate();
  reliability.validate();
  resource.validate();
  if (!(link_probability > 0.0 && link_probability <= 1.0)) {
    throw ValidationError("link_probability", "must lie in (0,1]");
  }
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
}

std::optional<std::size_t> ExperimentResult::top_strategy() const {
  const auto it =
      std::max_element(winning_strategy_histogram.begin(), winning_strategy_histogram.end());
  if (it == winning_strategy_histogram.end() || *it == 0) return std::nullopt;
  return static_cast<std::size_t>(it - winning_strategy_histogram.begin());
}

double sample_beta(const BetaParams& params, Rng& rng) {
  boost::random::beta_distribution<double> dist(params.a, params.b);
  return std::clamp(dist(rng), 0.0, 1.0);
}

WorkerGraph generate_pool(const PoolConfig& config, Rng& rng) {
  config.validate();
  std::vector<NodeRecord> nodes(config.pool_size);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].label = static_cast<NodeLabel>(i);
    nodes[i].reliability = i == 0 ? 1.0 : sample_beta(config.reliability, rng);
    for (double& r : nodes[i].resources) r = sample_beta(config.resource, rng);
  }
  std::vector<LinkRecord> links;
  for (NodeId s = 0; s < nodes.size(); ++s) {
    for (NodeId t = s + 1; t < nodes.size(); ++t) {
      if (uniform01(rng) >= config.link_probability) continue;
      double q = 0.0;
      while (q <= 0.0) q = sample_beta(config.quality, rng);
      links.push_back({s, t, q});
    }
  }
  return WorkerGraph(std::move(nodes), std::move(links), 0);
}

namespace {

ExperimentResult summarize(std::vector<TrialOutcome> outcomes, std::size_t strategies) {
  ExperimentResult r;
  r.winning_strategy_histogram.assign(strategies, 0);
  double score_sum = 0.0;
  double reduction_sum = 0.0;
  std::size_t found = 0;
  for (const TrialOutcome& o : outcomes) {
    reduction_sum += o.edge_reduction;
    if (o.score) {
      ++found;
      score_sum += *o.score;
      ++r.winning_strategy_histogram[*o.strategy];
    }
  }
  const auto n = static_cast<double>(outcomes.size());
  r.p_path_exists = static_cast<double>(found) / n;
  r.mean_edge_reduction = reduction_sum / n;
  r.mean_path_score =
      found ? score_sum / static_cast<double>(found) : std::numeric_limits<double>::quiet_NaN();
  r.trials = std::move(outcomes);
  return r;
}

TrialOutcome solve(const WorkerGraph& graph, const ExperimentSetup& setup, double reduction) {
  TrialOutcome o;
  o.edge_reduction = reduction;
  if (auto best = find_best_pipeline(graph, setup.table, setup.score_weights)) {
    o.score = best->score;
    o.strategy = best->strategy_index;
  }
  return o;
}

// Trials outermost; each pool and its pair scores are built once per grid.
// An empty grid means no trimming.
std::vector<ExperimentResult> run_grid(const PoolConfig& config, const ExperimentSetup& setup,
                                       std::span<const double> etas) {
  config.validate();
  setup.table.validate(true);
  setup.mins.validate();
  setup.trim.validate();
  setup.score_weights.validate();

  const std::size_t columns = std::max<std::size_t>(etas.size(), 1);
  std::vector<std::vector<TrialOutcome>> outcomes(columns);
  for (auto& o : outcomes) o.reserve(static_cast<std::size_t>(config.trials));

  for (std::int64_t t = 0; t < config.trials; ++t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    const WorkerGraph filtered = filter_qualified(generate_pool(config, rng), setup.mins);
    if (etas.empty()) {
      outcomes[0].push_back(solve(filtered, setup, 0.0));
      continue;
    }
    const Eigen::MatrixXd h = pair_scores(filtered, setup.trim, setup.resource_weights);
    for (std::size_t e = 0; e < etas.size(); ++e) {
      const TrimResult trimmed = trim_by_scores(filtered, h, etas[e]);
      outcomes[e].push_back(solve(trimmed.graph, setup, trimmed.report.edge_reduction_rate));
    }
  }

  std::vector<ExperimentResult> results;
  for (auto& o : outcomes) results.push_back(summarize(std::move(o), setup.table.strategies.size()));
  return results;
}

}  // namespace

ExperimentResult run_experiment(const PoolConfig& config, const ExperimentSetup& setup,
                                bool use_trimming) {
  if (!use_trimming) return std::move(run_grid(config, setup, {}).front());
  const double eta = setup.trim.eta;
  return std::move(run_grid(config, setup, std::span<const double>(&eta, 1)).front());
}

std::vector<SweepPoint> sweep_eta(const PoolConfig& config, const ExperimentSetup& setup,
                                  const std::vector<double>& eta_grid) {
  if (!std::is_sorted(eta_grid.begin(), eta_grid.end())) {
    throw ValidationError("eta_grid", "must be sorted ascending");
  }
  std::vector<SweepPoint> points;
  if (eta_grid.empty()) return points;
  auto results = run_grid(config, setup, eta_grid);
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    points.push_back({eta_grid[i], std::move(results[i])});
  }
  return points;
}

}  // namespace mopc
