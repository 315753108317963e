#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mopc {

// Dense node index, 0..M-1 within one graph.
using NodeId = std::size_t;
// External node label as it appears in input files.
using NodeLabel = std::int64_t;
// Ordered node sequence, requester first.
using Path = std::vector<NodeId>;

enum ResourceKind : std::size_t { kComputing = 0, kMemory, kBuffer, kBandwidth };
inline constexpr std::size_t kResourceKinds = 4;

// (computing, memory, buffer, bandwidth) indexes, each normalized to [0,1].
using ResourceVector = std::array<double, kResourceKinds>;

struct NodeRecord {
  NodeLabel label = 0;
  double reliability = 0.0;
  ResourceVector resources{};
};

struct LinkRecord {
  NodeId s = 0;
  NodeId t = 0;
  double quality = 0.0;
};

// Weighting vector used to collapse a resource vector into a scalar.
class ResourceWeights {
 public:
  // (0.4, 0.25, 0.25, 0.1)
  ResourceWeights();

  // Components must be non-negative and sum to 1 (within 1e-9).
  static ResourceWeights normalized(const ResourceVector& rho);
  // Only non-negativity is enforced.
  static ResourceWeights unnormalized(const ResourceVector& rho);

  const ResourceVector& rho() const noexcept { return rho_; }

 private:
  explicit ResourceWeights(const ResourceVector& rho) : rho_(rho) {}
  ResourceVector rho_;
};

struct ScoreWeights {
  double quality = 0.05;
  double reliability = 0.5;
  double strategy = 0.3;

  // Throws ValidationError unless all three are strictly positive.
  void validate() const;
};

struct Neighbor {
  NodeId node;
  double quality;
};

// Weighted undirected graph of workers. Immutable after construction; the
// constructor validates every invariant and throws ValidationError.
class WorkerGraph {
 public:
  WorkerGraph(std::vector<NodeRecord> nodes, std::vector<LinkRecord> links,
              NodeId requester);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t link_count() const noexcept { return links_.size(); }
  NodeId requester() const noexcept { return requester_; }

  const NodeRecord& node(NodeId id) const { return nodes_.at(id); }
  std::span<const NodeRecord> nodes() const noexcept { return nodes_; }
  // Sorted by (s, t) with s < t.
  std::span<const LinkRecord> links() const noexcept { return links_; }
  // Sorted by neighbor id.
  std::span<const Neighbor> neighbors(NodeId id) const { return adjacency_.at(id); }

  std::optional<double> quality(NodeId s, NodeId t) const;
  bool has_link(NodeId s, NodeId t) const { return quality(s, t).has_value(); }
  std::optional<NodeId> find_label(NodeLabel label) const;

  // Keeps nodes with keep_node[id] and links with keep_link[i] (indexing
  // links()) whose endpoints both survive. Surviving nodes are renumbered in
  // their original order, so relative id order is preserved. The requester
  // must be kept.
  WorkerGraph subgraph(const std::vector<bool>& keep_node,
                       const std::vector<bool>& keep_link) const;
  WorkerGraph induced_subgraph(const std::vector<bool>& keep_node) const;

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<LinkRecord> links_;
  std::vector<std::vector<Neighbor>> adjacency_;
  NodeId requester_;
};

// Square 0/1 or walk-count matrix, exact integer arithmetic.
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Geometric mean of the endpoint reliabilities. Throws std::domain_error
// outside [0,1].
double link_reliability(double r_s, double r_t);
double scalar_resource(const ResourceVector& resources, const ResourceWeights& weights);
// Geometric mean of the endpoint scalar resources; domain as link_reliability.
double link_resource(double u_s, double u_t);
double joint_link_weight(double quality, double reliability, double resource);
// Joint weight of the link (s, t) of `graph`; throws MissingLinkError.
double joint_link_weight(const WorkerGraph& graph, NodeId s, NodeId t,
                         const ResourceWeights& weights);

// Product of link qualities along the path.
double path_quality(std::span<const NodeId> path, const WorkerGraph& graph);
// Product of link reliabilities along the path.
double path_reliability(std::span<const NodeId> path, const WorkerGraph& graph);
double path_score(double quality, double reliability, double strategy_score,
                  const ScoreWeights& weights);

// a(s,t) = 1 iff (s,t) is a link and its joint weight is >= theta.
CountMatrix adjacency_matrix(const WorkerGraph& graph, double theta,
                             const ResourceWeights& weights);

}  // namespace mopc
