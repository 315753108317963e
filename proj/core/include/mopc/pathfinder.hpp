#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mopc/graph.hpp"

namespace mopc {

// One pipeline configuration: preference score, worker count and the minimum
// resources required at each position (position 0 is the requester).
struct Strategy {
  double score = 0.0;
  int length = 1;
  std::vector<ResourceVector> requirements;  // length + 1 rows
};

struct StrategyTable {
  std::vector<Strategy> strategies;

  // Shape checks; when `normalized` also requires every value in [0,1].
  void validate(bool normalized) const;
  int max_length() const;
};

struct MinRequirements {
  double q_min = 0.0;
  double r_min = 0.0;
  ResourceVector resource_min{};

  void validate() const;
};

struct PathCandidate {
  Path nodes;
  std::size_t strategy_index = 0;
  double quality = 0.0;
  double reliability = 0.0;
  double score = 0.0;
};

// Tree branch found by forward search: `to` is one step deeper than `from`.
struct DirectedEdge {
  NodeId from;
  NodeId to;
  auto operator<=>(const DirectedEdge&) const = default;
};
using BranchSet = std::vector<DirectedEdge>;  // sorted, unique

struct ForwardSearchResult {
  std::vector<BranchSet> branches;  // branches[k - 1] holds depth-k branches
  std::uint64_t edge_checks = 0;
};

struct SearchStats {
  std::uint64_t forward_edge_checks = 0;
  std::uint64_t backward_joins = 0;
  // Strategies whose position-0 row the requester fails.
  std::vector<std::size_t> skipped_strategies;
};

// Divides each resource column by its maximum over all strategies and
// positions. All-zero columns stay zero.
StrategyTable normalize_strategy_table(const StrategyTable& raw);

// Drops nodes below r_min or any resource minimum and links below q_min. The
// requester is always retained.
WorkerGraph filter_qualified(const WorkerGraph& graph, const MinRequirements& mins);

// Layered expansion of the simple-path tree rooted at `root`. An edge (u,v)
// belongs to depth k iff a simple path root..u with k-1 edges exists that
// does not visit v. One edge check is counted per examined (u,v) per depth.
ForwardSearchResult forward_search(const WorkerGraph& graph, NodeId root, int depth);

// Decides whether `node` may occupy pipeline position `position`.
using PositionFilter = std::function<bool(std::size_t position, NodeId node)>;

// Chains branches from the deepest level back to the root, returning every
// simple path with branches.size() edges, sorted lexicographically.
std::vector<Path> backward_trace(const std::vector<BranchSet>& branches, const WorkerGraph& graph,
                                 NodeId root);
std::vector<Path> backward_trace(const std::vector<BranchSet>& branches, const WorkerGraph& graph,
                                 NodeId root, const PositionFilter& accept,
                                 std::uint64_t* joins = nullptr);

bool meets_requirement(const ResourceVector& available, const ResourceVector& required);

// Componentwise node resources >= requirement at every position. Throws
// std::invalid_argument if path.size() != strategy.length + 1.
bool check_path_resources(const Path& path, const Strategy& strategy, const WorkerGraph& graph);

// Highest-scoring resource-feasible simple path for one strategy. Ties go to
// the lexicographically smallest node sequence.
std::optional<PathCandidate> best_path_for_strategy(const WorkerGraph& graph, NodeId root,
                                                    const Strategy& strategy,
                                                    const ScoreWeights& weights,
                                                    std::size_t strategy_index = 0,
                                                    SearchStats* stats = nullptr);

// Best (strategy, path) pair over the table, rooted at the requester. Ties go
// to the lowest strategy index, then to the path tie-break.
std::optional<PathCandidate> find_best_pipeline(const WorkerGraph& graph,
                                                const StrategyTable& table,
                                                const ScoreWeights& weights,
                                                SearchStats* stats = nullptr);

// Every resource-feasible path of every strategy, in strategy then path order.
std::vector<PathCandidate> all_feasible_paths(const WorkerGraph& graph, const StrategyTable& table,
                                              const ScoreWeights& weights);

// Plain recursive DFS over simple paths with `length` edges from `root`.
// Shares no code with forward_search/backward_trace; used as a reference.
std::vector<Path> enumerate_simple_paths_oracle(const WorkerGraph& graph, NodeId root,
                                                int length);

}  // namespace mopc
