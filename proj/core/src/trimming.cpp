#include "mopc/trimming.hpp"

#include <stdexcept>
#include <string>

#include "mopc/errors.hpp"

namespace mopc {

TrimConfig TrimConfig::with_max_length(int n_max, double theta, double eta) {
  TrimConfig config;
  config.theta = theta;
  config.eta = eta;
  config.n_max = n_max;
  // config.alpha starts as the default (0.3, 0.7, 0).
  config.alpha.resize(n_max >= 2 ? static_cast<std::size_t>(n_max - 1) : 0, 0.0);
  return config;
}

void TrimConfig::validate() const {
  if (n_max < 1) throw ValidationError("n_max", "must be >= 1");
  if (n_max >= 2 && alpha.size() != static_cast<std::size_t>(n_max - 1)) {
    throw ValidationError("alpha", "expected " + std::to_string(n_max - 1) + " weights, got " +
                                       std::to_string(alpha.size()));
  }
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0)) {
      throw ValidationError("alpha[" + std::to_string(i) + "]", "must be non-negative");
    }
  }
  if (!(eta >= 0.0)) throw ValidationError("eta", "must be non-negative");
  if (!(direct_weight >= 0.0)) throw ValidationError("direct_weight", "must be non-negative");
}

CountMatrix matrix_power(const CountMatrix& a, int n) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_power: matrix is not square");
  if (n < 0) throw std::invalid_argument("matrix_power: negative exponent");
  CountMatrix result = CountMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) result = result * a;
  return result;
}

Eigen::MatrixXd matrix_power_sum(const CountMatrix& a, std::span<const double> alpha, int n_max,
                                 double direct_weight) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("matrix_power_sum: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected square");
  }
  if (n_max < 2) throw std::invalid_argument("matrix_power_sum: n_max must be >= 2");
  if (alpha.size() != static_cast<std::size_t>(n_max - 1)) {
    throw std::invalid_argument("matrix_power_sum: alpha length must equal n_max - 1");
  }
  Eigen::MatrixXd h = direct_weight * a.cast<double>();
  CountMatrix power = a;
  for (int n = 2; n <= n_max; ++n) {
    power = power * a;
    h += alpha[static_cast<std::size_t>(n - 2)] * power.cast<double>();
  }
  return h;
}

TrimResult apply_node_mask(const WorkerGraph& graph, std::vector<bool> keep) {
  keep[graph.requester()] = true;
  TrimReport report;
  report.nodes_before = graph.node_count();
  report.edges_before = graph.link_count();
  WorkerGraph reduced = graph.induced_subgraph(keep);
  report.nodes_after = reduced.node_count();
  report.edges_after = reduced.link_count();
  report.edge_reduction_rate =
      report.edges_before == 0
          ? 0.0
          : 1.0 - static_cast<double>(report.edges_after) / static_cast<double>(report.edges_before);
  return {std::move(reduced), report};
}

namespace {

// Step 1: a node survives if any entry of its row clears the threshold.
// Rows include the diagonal, matching the s,t = 1..M range of the rule.
template <typename Matrix, typename Pred>
std::vector<bool> rows_with_entry(const Matrix& m, Pred keep_entry) {
  std::vector<bool> keep(static_cast<std::size_t>(m.rows()), false);
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    for (Eigen::Index t = 0; t < m.cols(); ++t) {
      if (keep_entry(m(s, t))) {
        keep[static_cast<std::size_t>(s)] = true;
        keep[static_cast<std::size_t>(t)] = true;
      }
    }
  }
  return keep;
}

}  // namespace

Eigen::MatrixXd pair_scores(const WorkerGraph& graph, const TrimConfig& config,
                            const ResourceWeights& weights) {
  config.validate();
  const CountMatrix a = adjacency_matrix(graph, config.theta, weights);
  const double direct = config.include_direct ? config.direct_weight : 0.0;
  // With n_max = 1 there are no power terms; only the optional direct term
  // can justify a pair.
  if (config.n_max < 2) return direct * a.cast<double>();
  return matrix_power_sum(a, config.alpha, config.n_max, direct);
}

TrimResult trim_by_scores(const WorkerGraph& graph, const Eigen::MatrixXd& scores, double eta) {
  if (scores.rows() != static_cast<Eigen::Index>(graph.node_count()) ||
      scores.cols() != scores.rows()) {
    throw std::invalid_argument("trim_by_scores: score matrix does not match graph");
  }
  return apply_node_mask(graph, rows_with_entry(scores, [eta](double v) { return v >= eta; }));
}

TrimResult trim_graph(const WorkerGraph& graph, const TrimConfig& config,
                      const ResourceWeights& weights) {
  return trim_by_scores(graph, pair_scores(graph, config, weights), config.eta);
}

TrimResult trim_graph_length1(const WorkerGraph& graph, double theta,
                              const ResourceWeights& weights) {
  const CountMatrix a = adjacency_matrix(graph, theta, weights);
  return apply_node_mask(graph, rows_with_entry(a, [](std::int64_t v) { return v == 1; }));
}

}  // namespace mopc
