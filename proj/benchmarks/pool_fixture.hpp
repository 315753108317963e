#pragma once

#include <cstdint>

#include "mopc/pool_sim.hpp"
#include "mopc/presets.hpp"

namespace mopc::bench {

// Rich-pool draw with `size` nodes, requester included.
inline WorkerGraph rich_graph(std::size_t size, std::uint64_t seed = 7) {
  PoolConfig config = presets::rich_pool(1, seed);
  config.pool_size = size;
  Rng rng(seed);
  return generate_pool(config, rng);
}

}  // namespace mopc::bench
