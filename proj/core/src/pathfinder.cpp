#include "mopc/pathfinder.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "mopc/errors.hpp"

namespace mopc {

void StrategyTable::validate(bool normalized) const {
  if (strategies.empty()) throw ValidationError("strategies", "table is empty");
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const Strategy& s = strategies[i];
    const std::string field = "strategies[" + std::to_string(i) + "]";
    if (s.length < 1) throw ValidationError(field + ".workers", "must be >= 1");
    if (s.requirements.size() != static_cast<std::size_t>(s.length) + 1) {
      throw ValidationError(field + ".requirements",
                            "expected " + std::to_string(s.length + 1) + " rows, got " +
                                std::to_string(s.requirements.size()));
    }
    if (!(s.score >= 0.0 && s.score <= 1.0)) {
      throw ValidationError(field + ".score", "must lie in [0,1]");
    }
    for (std::size_t p = 0; p < s.requirements.size(); ++p) {
      for (std::size_t k = 0; k < kResourceKinds; ++k) {
        const double v = s.requirements[p][k];
        if (!(v >= 0.0) || (normalized && v > 1.0)) {
          throw ValidationError(field + ".requirements[" + std::to_string(p) + "][" +
                                    std::to_string(k) + "]",
                                normalized ? "must lie in [0,1]" : "must be non-negative");
        }
      }
    }
  }
}

int StrategyTable::max_length() const {
  int n = 0;
  for (const Strategy& s : strategies) n = std::max(n, s.length);
  return n;
}

void MinRequirements::validate() const {
  auto unit = [](double v, const std::string& field) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(field, "must lie in [0,1]");
  };
  unit(q_min, "q_min");
  unit(r_min, "r_min");
  for (std::size_t k = 0; k < kResourceKinds; ++k) {
    unit(resource_min[k], "resource_min[" + std::to_string(k) + "]");
  }
}

StrategyTable normalize_strategy_table(const StrategyTable& raw) {
  raw.validate(false);
  ResourceVector column_max{};
  for (const Strategy& s : raw.strategies) {
    for (const ResourceVector& row : s.requirements) {
      for (std::size_t k = 0; k < kResourceKinds; ++k) {
        column_max[k] = std::max(column_max[k], row[k]);
      }
    }
  }
  StrategyTable out = raw;
  for (Strategy& s : out.strategies) {
    for (ResourceVector& row : s.requirements) {
      for (std::size_t k = 0; k < kResourceKinds; ++k) {
        row[k] = column_max[k] > 0.0 ? row[k] / column_max[k] : 0.0;
      }
    }
  }
  return out;
}

bool meets_requirement(const ResourceVector& available, const ResourceVector& required) {
  for (std::size_t k = 0; k < kResourceKinds; ++k) {
    if (available[k] < required[k]) return false;
  }
  return true;
}

WorkerGraph filter_qualified(const WorkerGraph& graph, const MinRequirements& mins) {
  std::vector<bool> keep_node(graph.node_count());
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    const NodeRecord& n = graph.node(i);
    keep_node[i] = i == graph.requester() ||
                   (n.reliability >= mins.r_min && meets_requirement(n.resources, mins.resource_min));
  }
  std::vector<bool> keep_link(graph.link_count());
  const auto links = graph.links();
  for (std::size_t i = 0; i < links.size(); ++i) keep_link[i] = links[i].quality >= mins.q_min;
  return graph.subgraph(keep_node, keep_link);
}

ForwardSearchResult forward_search(const WorkerGraph& graph, NodeId root, int depth) {
  if (root >= graph.node_count()) throw std::invalid_argument("forward_search: unknown root");
  if (depth < 1) throw std::invalid_argument("forward_search: depth must be >= 1");

  ForwardSearchResult result;
  result.branches.resize(static_cast<std::size_t>(depth));

  // Partial simple paths with k nodes, stored flat with stride k.
  std::vector<NodeId> layer{root};
  std::size_t stride = 1;

  auto contains = [](const NodeId* path, std::size_t n, NodeId v) {
    return std::find(path, path + n, v) != path + n;
  };

  for (int k = 1; k <= depth; ++k) {
    const std::size_t count = layer.size() / stride;
    if (count == 0) break;

    // Group partial paths by their end node.
    std::map<NodeId, std::vector<std::size_t>> by_end;
    for (std::size_t p = 0; p < count; ++p) by_end[layer[p * stride + stride - 1]].push_back(p);

    BranchSet& level = result.branches[static_cast<std::size_t>(k - 1)];
    for (const auto& [end, members] : by_end) {
      for (const Neighbor& nb : graph.neighbors(end)) {
        ++result.edge_checks;
        const bool branch = std::any_of(members.begin(), members.end(), [&](std::size_t p) {
          return !contains(&layer[p * stride], stride, nb.node);
        });
        if (branch) level.push_back({end, nb.node});
      }
    }
    // by_end and neighbors() are both ordered, so `level` is already sorted.

    if (k == depth) break;
    std::vector<NodeId> next;
    for (std::size_t p = 0; p < count; ++p) {
      const NodeId* path = &layer[p * stride];
      for (const Neighbor& nb : graph.neighbors(path[stride - 1])) {
        if (contains(path, stride, nb.node)) continue;
        next.insert(next.end(), path, path + stride);
        next.push_back(nb.node);
      }
    }
    layer = std::move(next);
    ++stride;
  }
  return result;
}

std::vector<Path> backward_trace(const std::vector<BranchSet>& branches, const WorkerGraph& graph,
                                 NodeId root) {
  return backward_trace(branches, graph, root, nullptr);
}

std::vector<Path> backward_trace(const std::vector<BranchSet>& branches, const WorkerGraph& graph,
                                 NodeId root, const PositionFilter& accept,
                                 std::uint64_t* joins) {
  const std::size_t n = branches.size();
  std::vector<Path> paths;
  if (n == 0 || branches.back().empty()) return paths;

  // parents[k][v] = nodes u with (u,v) a depth-(k+1) branch.
  std::vector<std::vector<std::vector<NodeId>>> parents(
      n, std::vector<std::vector<NodeId>>(graph.node_count()));
  for (std::size_t k = 0; k < n; ++k) {
    for (const DirectedEdge& e : branches[k]) parents[k][e.to].push_back(e.from);
  }

  auto ok = [&](std::size_t pos, NodeId v) { return !accept || accept(pos, v); };

  Path path(n + 1);
  std::uint64_t join_count = 0;

  // Fill path[pos] given path[pos + 1 .. n] already placed.
  auto grow = [&](auto&& self, std::size_t pos) -> void {
    if (pos == 0) {
      if (path[0] == root) paths.push_back(path);
      return;
    }
    const NodeId child = path[pos];
    for (NodeId u : parents[pos - 1][child]) {
      if (pos - 1 == 0 && u != root) continue;
      if (std::find(path.begin() + static_cast<std::ptrdiff_t>(pos) + 1, path.end(), u) !=
          path.end()) {
        continue;
      }
      if (!ok(pos - 1, u)) continue;
      ++join_count;
      path[pos - 1] = u;
      self(self, pos - 1);
    }
  };

  for (const DirectedEdge& leaf : branches.back()) {
    if (leaf.from == leaf.to) continue;
    if (!ok(n, leaf.to) || !ok(n - 1, leaf.from)) continue;
    path[n] = leaf.to;
    path[n - 1] = leaf.from;
    if (n == 1) {
      if (leaf.from == root) paths.push_back(path);
      continue;
    }
    grow(grow, n - 1);
  }
  if (joins) *joins += join_count;
  std::sort(paths.begin(), paths.end());
  return paths;
}

bool check_path_resources(const Path& path, const Strategy& strategy, const WorkerGraph& graph) {
  if (path.size() != strategy.requirements.size()) {
    throw std::invalid_argument("check_path_resources: path has " + std::to_string(path.size()) +
                                " nodes, strategy needs " +
                                std::to_string(strategy.requirements.size()));
  }
  for (std::size_t pos = 0; pos < path.size(); ++pos) {
    if (!meets_requirement(graph.node(path[pos]).resources, strategy.requirements[pos])) {
      return false;
    }
  }
  return true;
}

namespace {

bool better(const PathCandidate& a, const PathCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.nodes < b.nodes;
}

std::vector<PathCandidate> scored_paths(const WorkerGraph& graph, NodeId root,
                                        const Strategy& strategy, const ScoreWeights& weights,
                                        std::size_t strategy_index,
                                        const ForwardSearchResult& forward, SearchStats* stats) {
  std::vector<PathCandidate> out;
  if (forward.branches.empty() || forward.branches.back().empty()) return out;
  const auto accept = [&](std::size_t pos, NodeId v) {
    return meets_requirement(graph.node(v).resources, strategy.requirements[pos]);
  };
  std::uint64_t joins = 0;
  for (Path& p : backward_trace(forward.branches, graph, root, accept, &joins)) {
    PathCandidate c;
    c.quality = path_quality(p, graph);
    c.reliability = path_reliability(p, graph);
    c.score = path_score(c.quality, c.reliability, strategy.score, weights);
    c.strategy_index = strategy_index;
    c.nodes = std::move(p);
    out.push_back(std::move(c));
  }
  if (stats) stats->backward_joins += joins;
  return out;
}

std::optional<PathCandidate> pick_best(std::vector<PathCandidate> candidates) {
  if (candidates.empty()) return std::nullopt;
  auto it = std::min_element(candidates.begin(), candidates.end(),
                             [](const PathCandidate& a, const PathCandidate& b) { return better(a, b); });
  return std::move(*it);
}

// Runs the per-strategy search for every strategy, reusing the forward search
// across strategies of equal length.
template <typename Sink>
void search_table(const WorkerGraph& graph, const StrategyTable& table,
                  const ScoreWeights& weights, SearchStats* stats, Sink sink) {
  const NodeId root = graph.requester();
  std::map<int, ForwardSearchResult> forward_by_length;
  for (std::size_t i = 0; i < table.strategies.size(); ++i) {
    const Strategy& s = table.strategies[i];
    if (!meets_requirement(graph.node(root).resources, s.requirements.at(0))) {
      if (stats) stats->skipped_strategies.push_back(i);
      continue;
    }
    auto it = forward_by_length.find(s.length);
    if (it == forward_by_length.end()) {
      it = forward_by_length.emplace(s.length, forward_search(graph, root, s.length)).first;
      if (stats) stats->forward_edge_checks += it->second.edge_checks;
    }
    sink(scored_paths(graph, root, s, weights, i, it->second, stats));
  }
}

}  // namespace

std::optional<PathCandidate> best_path_for_strategy(const WorkerGraph& graph, NodeId root,
                                                    const Strategy& strategy,
                                                    const ScoreWeights& weights,
                                                    std::size_t strategy_index,
                                                    SearchStats* stats) {
  if (strategy.requirements.size() != static_cast<std::size_t>(strategy.length) + 1) {
    throw std::invalid_argument("best_path_for_strategy: malformed strategy");
  }
  if (!meets_requirement(graph.node(root).resources, strategy.requirements[0])) {
    if (stats) stats->skipped_strategies.push_back(strategy_index);
    return std::nullopt;
  }
  const ForwardSearchResult forward = forward_search(graph, root, strategy.length);
  if (stats) stats->forward_edge_checks += forward.edge_checks;
  return pick_best(scored_paths(graph, root, strategy, weights, strategy_index, forward, stats));
}

std::optional<PathCandidate> find_best_pipeline(const WorkerGraph& graph,
                                                const StrategyTable& table,
                                                const ScoreWeights& weights, SearchStats* stats) {
  std::optional<PathCandidate> best;
  search_table(graph, table, weights, stats, [&](std::vector<PathCandidate> candidates) {
    auto winner = pick_best(std::move(candidates));
    // Strategies arrive in index order, so a strict improvement keeps the
    // lowest index on ties.
    if (winner && (!best || winner->score > best->score)) best = std::move(winner);
  });
  return best;
}

std::vector<PathCandidate> all_feasible_paths(const WorkerGraph& graph, const StrategyTable& table,
                                              const ScoreWeights& weights) {
  std::vector<PathCandidate> out;
  search_table(graph, table, weights, nullptr, [&](std::vector<PathCandidate> candidates) {
    std::move(candidates.begin(), candidates.end(), std::back_inserter(out));
  });
  return out;
}

}  // namespace mopc
