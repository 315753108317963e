#include "mopc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "mopc/errors.hpp"

namespace mopc {
namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

void require_unit(double x, const char* what) {
  if (!in_unit_interval(x)) {
    throw std::domain_error(std::string(what) + " must lie in [0,1], got " +
                            std::to_string(x));
  }
}

std::string node_field(std::size_t index, const char* member) {
  return "nodes[" + std::to_string(index) + "]." + member;
}

}  // namespace

ResourceWeights::ResourceWeights() : rho_{0.4, 0.25, 0.25, 0.1} {}

ResourceWeights ResourceWeights::unnormalized(const ResourceVector& rho) {
  for (std::size_t k = 0; k < kResourceKinds; ++k) {
    if (!(rho[k] >= 0.0) || !std::isfinite(rho[k])) {
      throw ValidationError("rho[" + std::to_string(k) + "]", "must be non-negative");
    }
  }
  return ResourceWeights(rho);
}

ResourceWeights ResourceWeights::normalized(const ResourceVector& rho) {
  ResourceWeights weights = unnormalized(rho);
  const double sum = std::accumulate(rho.begin(), rho.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("rho", "components must sum to 1, got " + std::to_string(sum));
  }
  return weights;
}

void ScoreWeights::validate() const {
  if (!(quality > 0.0)) throw ValidationError("beta1", "must be strictly positive");
  if (!(reliability > 0.0)) throw ValidationError("beta2", "must be strictly positive");
  if (!(strategy > 0.0)) throw ValidationError("beta3", "must be strictly positive");
}

WorkerGraph::WorkerGraph(std::vector<NodeRecord> nodes, std::vector<LinkRecord> links,
                         NodeId requester)
    : nodes_(std::move(nodes)), links_(std::move(links)), requester_(requester) {
  std::unordered_set<NodeLabel> labels;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const NodeRecord& n = nodes_[i];
    if (!labels.insert(n.label).second) {
      throw ValidationError(node_field(i, "id"), "duplicate node id " + std::to_string(n.label));
    }
    if (!in_unit_interval(n.reliability)) {
      throw ValidationError(node_field(i, "reliability"),
                            "node " + std::to_string(n.label) + " reliability " +
                                std::to_string(n.reliability) + " outside [0,1]");
    }
    for (std::size_t k = 0; k < kResourceKinds; ++k) {
      if (!in_unit_interval(n.resources[k])) {
        throw ValidationError(node_field(i, "resources") + "[" + std::to_string(k) + "]",
                              "node " + std::to_string(n.label) + " resource outside [0,1]");
      }
    }
  }
  if (requester_ >= nodes_.size()) {
    throw ValidationError("requester", "requester is not a node of the graph");
  }
  if (nodes_[requester_].reliability != 1.0) {
    throw ValidationError("requester", "requester reliability must be 1");
  }

  for (std::size_t i = 0; i < links_.size(); ++i) {
    LinkRecord& l = links_[i];
    const std::string field = "links[" + std::to_string(i) + "]";
    if (l.s >= nodes_.size() || l.t >= nodes_.size()) {
      throw ValidationError(field, "endpoint is not a node of the graph");
    }
    if (l.s == l.t) throw ValidationError(field, "self loop");
    if (!(l.quality > 0.0 && l.quality <= 1.0)) {
      throw ValidationError(field + ".quality", "quality must lie in (0,1]");
    }
    if (l.s > l.t) std::swap(l.s, l.t);
  }
  std::sort(links_.begin(), links_.end(), [](const LinkRecord& a, const LinkRecord& b) {
    return a.s != b.s ? a.s < b.s : a.t < b.t;
  });
  for (std::size_t i = 1; i < links_.size(); ++i) {
    if (links_[i].s == links_[i - 1].s && links_[i].t == links_[i - 1].t) {
      throw ValidationError("links", "duplicate link between nodes " +
                                         std::to_string(nodes_[links_[i].s].label) + " and " +
                                         std::to_string(nodes_[links_[i].t].label));
    }
  }

  adjacency_.resize(nodes_.size());
  for (const LinkRecord& l : links_) {
    adjacency_[l.s].push_back({l.t, l.quality});
    adjacency_[l.t].push_back({l.s, l.quality});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

std::optional<double> WorkerGraph::quality(NodeId s, NodeId t) const {
  if (s >= nodes_.size() || t >= nodes_.size()) return std::nullopt;
  const auto& list = adjacency_[s];
  auto it = std::lower_bound(list.begin(), list.end(), t,
                             [](const Neighbor& n, NodeId id) { return n.node < id; });
  if (it == list.end() || it->node != t) return std::nullopt;
  return it->quality;
}

std::optional<NodeId> WorkerGraph::find_label(NodeLabel label) const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].label == label) return i;
  }
  return std::nullopt;
}

WorkerGraph WorkerGraph::subgraph(const std::vector<bool>& keep_node,
                                  const std::vector<bool>& keep_link) const {
  if (keep_node.size() != nodes_.size() || keep_link.size() != links_.size()) {
    throw std::invalid_argument("subgraph: mask size mismatch");
  }
  if (!keep_node[requester_]) throw std::invalid_argument("subgraph: requester must be kept");

  constexpr NodeId kDropped = static_cast<NodeId>(-1);
  std::vector<NodeId> remap(nodes_.size(), kDropped);
  std::vector<NodeRecord> nodes;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (keep_node[i]) {
      remap[i] = nodes.size();
      nodes.push_back(nodes_[i]);
    }
  }
  std::vector<LinkRecord> links;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const LinkRecord& l = links_[i];
    if (keep_link[i] && keep_node[l.s] && keep_node[l.t]) {
      links.push_back({remap[l.s], remap[l.t], l.quality});
    }
  }
  return WorkerGraph(std::move(nodes), std::move(links), remap[requester_]);
}

WorkerGraph WorkerGraph::induced_subgraph(const std::vector<bool>& keep_node) const {
  return subgraph(keep_node, std::vector<bool>(links_.size(), true));
}

double link_reliability(double r_s, double r_t) {
  require_unit(r_s, "node reliability");
  require_unit(r_t, "node reliability");
  return std::sqrt(r_s * r_t);
}

double scalar_resource(const ResourceVector& resources, const ResourceWeights& weights) {
  double u = 0.0;
  for (std::size_t k = 0; k < kResourceKinds; ++k) u += resources[k] * weights.rho()[k];
  return u;
}

double link_resource(double u_s, double u_t) {
  require_unit(u_s, "node resource");
  require_unit(u_t, "node resource");
  return std::sqrt(u_s * u_t);
}

double joint_link_weight(double quality, double reliability, double resource) {
  return quality * reliability * resource;
}

double joint_link_weight(const WorkerGraph& graph, NodeId s, NodeId t,
                         const ResourceWeights& weights) {
  const auto q = graph.quality(s, t);
  if (!q) throw MissingLinkError("no link between nodes " + std::to_string(s) + " and " + std::to_string(t));
  const NodeRecord& a = graph.node(s);
  const NodeRecord& b = graph.node(t);
  // Unnormalized rho may push the scalar above 1; clamp keeps the geometric
  // mean defined.
  const double u_s = std::min(1.0, scalar_resource(a.resources, weights));
  const double u_t = std::min(1.0, scalar_resource(b.resources, weights));
  return joint_link_weight(*q, link_reliability(a.reliability, b.reliability),
                           link_resource(u_s, u_t));
}

namespace {

template <typename LinkValue>
double path_product(std::span<const NodeId> path, const WorkerGraph& graph, LinkValue value) {
  double product = 1.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto q = graph.quality(path[k - 1], path[k]);
    if (!q) {
      throw MissingLinkError("path step " + std::to_string(k) + " (" +
                             std::to_string(path[k - 1]) + " -> " + std::to_string(path[k]) +
                             ") is not a link");
    }
    product *= value(path[k - 1], path[k], *q);
  }
  return product;
}

}  // namespace

double path_quality(std::span<const NodeId> path, const WorkerGraph& graph) {
  return path_product(path, graph, [](NodeId, NodeId, double q) { return q; });
}

double path_reliability(std::span<const NodeId> path, const WorkerGraph& graph) {
  return path_product(path, graph, [&graph](NodeId s, NodeId t, double) {
    return link_reliability(graph.node(s).reliability, graph.node(t).reliability);
  });
}

double path_score(double quality, double reliability, double strategy_score,
                  const ScoreWeights& weights) {
  return weights.quality * quality + weights.reliability * reliability +
         weights.strategy * strategy_score;
}

CountMatrix adjacency_matrix(const WorkerGraph& graph, double theta,
                             const ResourceWeights& weights) {
  const auto m = static_cast<Eigen::Index>(graph.node_count());
  CountMatrix a = CountMatrix::Zero(m, m);
  for (const LinkRecord& l : graph.links()) {
    if (joint_link_weight(graph, l.s, l.t, weights) >= theta) {
      a(static_cast<Eigen::Index>(l.s), static_cast<Eigen::Index>(l.t)) = 1;
      a(static_cast<Eigen::Index>(l.t), static_cast<Eigen::Index>(l.s)) = 1;
    }
  }
  return a;
}

}  // namespace mopc
