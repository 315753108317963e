#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mopc/graph.hpp"

namespace mopc {

// Parameters of the adjacency-matrix-power trimming rule
//   H = sum_{n=2}^{n_max} alpha[n-2] * A^n   (+ direct_weight * A, if enabled)
// A pair (s,t) with H(s,t) >= eta keeps both s and t.
struct TrimConfig {
  double theta = 0.0;  // joint-link-weight threshold used to build A
  double eta = 0.0;
  std::vector<double> alpha{0.3, 0.7, 0.0};  // weights for A^2 .. A^n_max
  int n_max = 4;
  // Optional A^1 term, off by default.
  bool include_direct = false;
  double direct_weight = 0.0;

  // Default alpha (0.3, 0.7, 0) truncated or zero-padded to n_max - 1 entries.
  static TrimConfig with_max_length(int n_max, double theta, double eta);

  // Throws ValidationError.
  void validate() const;
};

struct TrimReport {
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
  // 1 - edges_after / edges_before, or 0 for an edgeless input.
  double edge_reduction_rate = 0.0;
};

struct TrimResult {
  WorkerGraph graph;
  TrimReport report;
};

// Integer power of a square count matrix by repeated multiplication.
CountMatrix matrix_power(const CountMatrix& a, int n);

// Weighted sum of A^2..A^n_max; the powers are formed exactly in integers
// before weighting. Throws std::invalid_argument if A is not square, n_max < 2
// or alpha.size() != n_max - 1.
Eigen::MatrixXd matrix_power_sum(const CountMatrix& a, std::span<const double> alpha, int n_max,
                                 double direct_weight = 0.0);

// H for the graph under `config` (eta is not used).
Eigen::MatrixXd pair_scores(const WorkerGraph& graph, const TrimConfig& config,
                            const ResourceWeights& weights);

// Steps 1 and 2 given precomputed pair scores.
TrimResult trim_by_scores(const WorkerGraph& graph, const Eigen::MatrixXd& scores, double eta);

TrimResult trim_graph(const WorkerGraph& graph, const TrimConfig& config,
                      const ResourceWeights& weights);

// The plain two-step rule for length-1 pipelines: keep the endpoints of every
// pair with a(s,t) = 1.
TrimResult trim_graph_length1(const WorkerGraph& graph, double theta,
                              const ResourceWeights& weights);

// Step 2 of the rule given the kept-node mask from step 1. The requester is
// always kept.
TrimResult apply_node_mask(const WorkerGraph& graph, std::vector<bool> keep);

}  // namespace mopc
