#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mopc/graph.hpp"
#include "mopc/pathfinder.hpp"
#include "mopc/random.hpp"
#include "mopc/trimming.hpp"

namespace mopc {

struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  void validate() const;
  double mean() const { return a / (a + b); }
};

struct PoolConfig {
  std::size_t pool_size = 20;
  BetaParams quality;
  BetaParams reliability;
  BetaParams resource;
  double link_probability = 1.0;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TrialOutcome {
  std::optional<double> score;          // best path score, if any path exists
  std::optional<std::size_t> strategy;  // winning strategy index
  double edge_reduction = 0.0;
};

struct ExperimentResult {
  double mean_path_score = 0.0;  // over trials with a path; NaN if none
  double p_path_exists = 0.0;
  double mean_edge_reduction = 0.0;
  std::vector<std::size_t> winning_strategy_histogram;  // one bin per strategy
  std::vector<TrialOutcome> trials;

  // Index of the most frequent winner (lowest index on ties), if any.
  std::optional<std::size_t> top_strategy() const;
};

// Everything a pool experiment needs besides the pool itself.
struct ExperimentSetup {
  StrategyTable table;  // normalized
  MinRequirements mins;
  TrimConfig trim;  // n_max / alpha must match the table
  ScoreWeights score_weights;
  ResourceWeights resource_weights;
};

double sample_beta(const BetaParams& params, Rng& rng);

// Node 0 is the requester (reliability 1). Per node: reliability (workers
// only) then four resource draws; then per unordered pair (s < t) in
// lexicographic order: a link draw and, if linked, a quality draw (redrawn
// while exactly 0).
WorkerGraph generate_pool(const PoolConfig& config, Rng& rng);

// Per trial: generate -> filter_qualified -> optionally trim -> find_best_pipeline.
// Trial t uses Rng(derive_seed(config.seed, t)).
ExperimentResult run_experiment(const PoolConfig& config, const ExperimentSetup& setup,
                                bool use_trimming);

struct SweepPoint {
  double eta;
  ExperimentResult result;
};

// One result per eta with identical per-trial pools across the grid. The
// grid must be sorted ascending.
std::vector<SweepPoint> sweep_eta(const PoolConfig& config, const ExperimentSetup& setup,
                                  const std::vector<double>& eta_grid);

}  // namespace mopc
