#include "mopc/presets.hpp"

namespace mopc::presets {

StrategyTable lenet_strategies_raw() {
  // Rows: requester, worker 1, worker 2[, worker 3].
  return StrategyTable{{
      {0.0989, 2, {{0, 0, 0, 1834}, {10164.7, 15.6, 313.6, 4361}, {15363.1, 4427, 1382.4, 60}}},
      {0.2248, 2, {{0, 0, 0, 1834}, {10096.6, 15.6, 313.6, 1623}, {18172.2, 4427, 345.6, 60}}},
      {0.2511, 2, {{0, 0, 0, 1834}, {18872.9, 257.6, 313.6, 1721}, {5925.0, 4185, 409.6, 60}}},
      {0.3204, 2, {{0, 0, 0, 1834}, {18521.2, 257.6, 313.6, 620}, {6712.1, 4185, 102.4, 60}}},
      {0.4107, 2, {{0, 0, 0, 1834}, {16188.2, 3341.6, 313.6, 471}, {3522.6, 1101, 48.0, 60}}},
      {0.4681, 2, {{0, 0, 0, 1834}, {15504.4, 4357.6, 313.6, 494}, {466.7, 85, 33.6, 60}}},
      {0.0759, 3,
       {{0, 0, 0, 1834},
        {10096.6, 15.6, 313.6, 1472},
        {30317.7, 242, 345.6, 621},
        {6716.1, 4185, 102.4, 60}}},
      {0.1435, 3,
       {{0, 0, 0, 1834},
        {10096.6, 15.6, 313.6, 1472},
        {22602.4, 3326, 345.6, 471},
        {3522.6, 1101, 48.0, 60}}},
  }};
}

PoolConfig poor_pool(std::int64_t trials, std::uint64_t seed) {
  PoolConfig c;
  c.pool_size = 20;
  c.quality = c.reliability = c.resource = BetaParams{4.0, 4.0};
  c.trials = trials;
  c.seed = seed;
  return c;
}

PoolConfig rich_pool(std::int64_t trials, std::uint64_t seed) {
  PoolConfig c;
  c.pool_size = 28;
  c.quality = c.reliability = c.resource = BetaParams{5.0, 2.0};
  c.trials = trials;
  c.seed = seed;
  return c;
}

}  // namespace mopc::presets
