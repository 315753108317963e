#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mopc/graph.hpp"
#include "mopc/pathfinder.hpp"
#include "mopc/session_sim.hpp"

namespace mopc::io {

// Reads the whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);
// Parses JSON; syntax errors become ValidationError naming `source`.
nlohmann::json parse_json(const std::string& text, const std::string& source);

// {"requester": id,
//  "nodes": [{"id": 1, "reliability": 0.9, "resources": [c, m, b, w]}, ...],
//  "links": [{"s": 1, "t": 2, "quality": 0.8}, ...]}
// Ids are arbitrary integers; they are mapped to dense indices in file order.
WorkerGraph graph_from_json(const nlohmann::json& doc);
nlohmann::json graph_to_json(const WorkerGraph& graph);
WorkerGraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const WorkerGraph& graph);

// {"units": "physical" | "normalized",
//  "strategies": [{"score": 0.47, "workers": 2,
//                  "requirements": [[c, m, b, w], ...]}]}
// One requirements row per position, requester first. Physical units (the
// default) are column-max normalized on load.
StrategyTable strategies_from_json(const nlohmann::json& doc);
StrategyTable load_strategies(const std::filesystem::path& path);

// {"stages": [{"process_time": .., "buffer_capacity": .., "link_transfer_time": ..}],
//  "n_packages": .., "initial_feed_interval": .., "timeout": .., "rate_backoff_factor": ..,
//  optional "feed_transfer_time", "control_delay", "serialize_transfer", "jitter", "seed"}
SessionSpec session_spec_from_json(const nlohmann::json& doc);

[[noreturn]] void throw_missing(const std::string& field);
[[noreturn]] void throw_type(const std::string& field);

// Typed field access with ValidationError on absence or type mismatch.
template <typename T>
T required(const nlohmann::json& obj, const std::string& key, const std::string& context) {
  const std::string field = context.empty() ? key : context + "." + key;
  if (!obj.is_object() || !obj.contains(key)) throw_missing(field);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_type(field);
  }
}

template <typename T>
T optional(const nlohmann::json& obj, const std::string& key, const std::string& context,
           T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return required<T>(obj, key, context);
}

}  // namespace mopc::io
