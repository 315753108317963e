#pragma once

#include <cstdint>

#include "mopc/pathfinder.hpp"
#include "mopc/pool_sim.hpp"
#include "mopc/stability.hpp"

namespace mopc::presets {

// Eight LeNet inference strategies measured on the Raspberry Pi testbed, in
// physical units (MAC/s, kB, kB, kB/s). Normalize before use.
StrategyTable lenet_strategies_raw();

// Small pool in poor condition: M = 20, Beta(4,4) for every random variable.
PoolConfig poor_pool(std::int64_t trials = 1000, std::uint64_t seed = 1);
// Large pool in good condition: M = 28, Beta(5,2) for every random variable.
PoolConfig rich_pool(std::int64_t trials = 1000, std::uint64_t seed = 1);

// Measured 28 GHz blockage constants: eps = 6.93e-4, dt = 3.3 ms.
inline BlockageModel measured_blockage() { return BlockageModel{6.93e-4, 3.3e-3}; }

}  // namespace mopc::presets
