#include <algorithm>
#include <stdexcept>

#include "mopc/pathfinder.hpp"

namespace mopc {
namespace {

void extend(const WorkerGraph& graph, Path& current, std::vector<bool>& on_path, int remaining,
            std::vector<Path>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (const Neighbor& nb : graph.neighbors(current.back())) {
    if (on_path[nb.node]) continue;
    on_path[nb.node] = true;
    current.push_back(nb.node);
    extend(graph, current, on_path, remaining - 1, out);
    current.pop_back();
    on_path[nb.node] = false;
  }
}

}  // namespace

std::vector<Path> enumerate_simple_paths_oracle(const WorkerGraph& graph, NodeId root,
                                                int length) {
  if (length < 1) throw std::invalid_argument("enumerate_simple_paths_oracle: length must be >= 1");
  std::vector<Path> out;
  Path current{root};
  std::vector<bool> on_path(graph.node_count(), false);
  on_path[root] = true;
  extend(graph, current, on_path, length, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mopc
