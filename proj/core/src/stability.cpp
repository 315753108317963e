#include "mopc/stability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mopc/errors.hpp"
#include "mopc/random.hpp"

namespace mopc {

void BlockageModel::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon", "must lie in [0,1]");
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
    throw ValidationError("delta_t", "must be positive");
  }
}

void StabilityQuery::validate() const {
  if (!(session_time >= 0.0) || !std::isfinite(session_time)) {
    throw ValidationError("session_time", "must be non-negative");
  }
  if (n_node < 2) throw ValidationError("n_node", "must be >= 2");
  if (concurrent < 1) throw ValidationError("K", "must be >= 1");
}

std::int64_t StabilityQuery::steps(const BlockageModel& model) const {
  return std::llround(session_time / model.delta_t);
}

double success_probability_single(const StabilityQuery& query, const BlockageModel& model) {
  query.validate();
  model.validate();
  const double exponent =
      static_cast<double>(query.steps(model)) * static_cast<double>(query.n_node - 1);
  if (exponent == 0.0) return 1.0;
  return std::exp(exponent * std::log1p(-model.epsilon));
}

double success_probability_multi(const StabilityQuery& query, const BlockageModel& model) {
  const double single = success_probability_single(query, model);
  return 1.0 - std::pow(1.0 - single, query.concurrent);
}

double expected_attempts(const StabilityQuery& query, const BlockageModel& model) {
  const double p = success_probability_multi(query, model);
  if (p <= 0.0) {
    throw std::overflow_error("expected_attempts: success probability underflows to zero");
  }
  return 1.0 / p;
}

double simulate_sessions(const StabilityQuery& query, const BlockageModel& model,
                         std::int64_t trials, std::uint64_t seed) {
  query.validate();
  model.validate();
  if (trials < 1) throw ValidationError("trials", "must be >= 1");

  const std::int64_t m = query.steps(model);
  // eps * 2^64, saturated below 2^64.
  const double scaled = std::ldexp(model.epsilon, 64);
  const std::uint64_t threshold = scaled >= 0x1.0p64 ? std::numeric_limits<std::uint64_t>::max()
                                                     : static_cast<std::uint64_t>(scaled);
  const int links = query.n_node - 1;

  std::int64_t successes = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    bool any_survives = false;
    for (int k = 0; k < query.concurrent && !any_survives; ++k) {
      bool pipeline_alive = true;
      for (int l = 0; l < links && pipeline_alive; ++l) {
        for (std::int64_t step = 0; step < m; ++step) {
          if (rng() < threshold) {
            pipeline_alive = false;
            break;
          }
        }
      }
      any_survives = pipeline_alive;
    }
    if (any_survives) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

std::vector<StabilityRow> stability_table(const BlockageModel& model,
                                          const std::vector<double>& session_times,
                                          const std::vector<int>& n_nodes,
                                          const std::vector<int>& concurrency,
                                          std::int64_t mc_trials, std::uint64_t seed) {
  std::vector<StabilityRow> rows;
  std::uint64_t point = 0;
  for (double t : session_times) {
    for (int n : n_nodes) {
      for (int k : concurrency) {
        const StabilityQuery q{t, n, k};
        StabilityRow row{t, n, k, success_probability_multi(q, model), std::nullopt, 0.0};
        row.expected_attempts =
            row.formula > 0.0 ? 1.0 / row.formula : std::numeric_limits<double>::infinity();
        if (mc_trials > 0) row.monte_carlo = simulate_sessions(q, model, mc_trials, derive_seed(seed, point));
        rows.push_back(row);
        ++point;
      }
    }
  }
  return rows;
}

}  // namespace mopc
