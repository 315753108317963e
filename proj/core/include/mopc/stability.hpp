#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace mopc {

// Two-state (Unshadowed/Shadowed) discrete-time blockage chain. Only the
// G->B probability matters: a session fails on the first entry into B.
struct BlockageModel {
  double epsilon = 6.93e-4;  // Pr(B | G) per step, in [0,1]
  double delta_t = 3.3e-3;   // step length, seconds

  void validate() const;
};

struct StabilityQuery {
  double session_time = 1.0;  // seconds
  int n_node = 2;             // nodes on one pipeline, requester included
  int concurrent = 1;         // K independent pipelines

  void validate() const;
  // round(T / dt), halves away from zero.
  std::int64_t steps(const BlockageModel& model) const;
};

// (1 - eps)^(m (n_node - 1)), evaluated as exp(k * log1p(-eps)).
double success_probability_single(const StabilityQuery& query, const BlockageModel& model);
// 1 - (1 - P_S(T,1))^K
double success_probability_multi(const StabilityQuery& query, const BlockageModel& model);
// 1 / P_S(T,K). Throws std::overflow_error when P_S underflows to zero.
double expected_attempts(const StabilityQuery& query, const BlockageModel& model);

// Monte Carlo estimate of P_S(T,K). Every link of every pipeline starts in G
// and is stepped m times; a step enters B when the raw 64-bit draw falls below
// eps * 2^64. A pipeline survives if none of its links enters B; a trial
// succeeds if any pipeline survives. Trial t uses its own generator seeded by
// derive_seed(seed, t).
double simulate_sessions(const StabilityQuery& query, const BlockageModel& model,
                         std::int64_t trials, std::uint64_t seed);

struct StabilityRow {
  double session_time;
  int n_node;
  int concurrent;
  double formula;
  std::optional<double> monte_carlo;
  double expected_attempts;  // +inf when formula == 0
};

// Cartesian product in (T, n_node, K) order. Grid point i is simulated with
// seed derive_seed(seed, i); mc_trials == 0 skips simulation.
std::vector<StabilityRow> stability_table(const BlockageModel& model,
                                          const std::vector<double>& session_times,
                                          const std::vector<int>& n_nodes,
                                          const std::vector<int>& concurrency,
                                          std::int64_t mc_trials, std::uint64_t seed);

}  // namespace mopc
