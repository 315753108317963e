#include "mopc/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mopc/errors.hpp"

namespace mopc::io {

using nlohmann::json;

void throw_missing(const std::string& field) { throw ValidationError(field, "missing field"); }
void throw_type(const std::string& field) { throw ValidationError(field, "wrong type"); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw IoError("cannot write " + path.string());
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source, std::string("malformed JSON: ") + e.what());
  }
}

namespace {

const json& required_array(const json& obj, const std::string& key, const std::string& context) {
  const std::string field = context.empty() ? key : context + "." + key;
  if (!obj.is_object() || !obj.contains(key)) throw_missing(field);
  if (!obj.at(key).is_array()) throw_type(field);
  return obj.at(key);
}

ResourceVector resource_row(const json& row, const std::string& field) {
  if (!row.is_array() || row.size() != kResourceKinds) {
    throw ValidationError(field, "expected an array of 4 numbers");
  }
  ResourceVector v{};
  for (std::size_t k = 0; k < kResourceKinds; ++k) {
    if (!row[k].is_number()) throw_type(field + "[" + std::to_string(k) + "]");
    v[k] = row[k].get<double>();
  }
  return v;
}

}  // namespace

WorkerGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("graph", "expected a JSON object");
  const auto requester = required<NodeLabel>(doc, "requester", "");
  const json& nodes_json = required_array(doc, "nodes", "");
  const json& links_json = required_array(doc, "links", "");

  std::vector<NodeRecord> nodes;
  std::unordered_map<NodeLabel, NodeId> index;
  for (std::size_t i = 0; i < nodes_json.size(); ++i) {
    const std::string ctx = "nodes[" + std::to_string(i) + "]";
    NodeRecord n;
    n.label = required<NodeLabel>(nodes_json[i], "id", ctx);
    n.reliability = required<double>(nodes_json[i], "reliability", ctx);
    if (!nodes_json[i].contains("resources")) throw_missing(ctx + ".resources");
    n.resources = resource_row(nodes_json[i]["resources"], ctx + ".resources");
    if (!index.emplace(n.label, nodes.size()).second) {
      throw ValidationError(ctx + ".id", "duplicate node id " + std::to_string(n.label));
    }
    nodes.push_back(n);
  }
  auto lookup = [&](NodeLabel label, const std::string& field) {
    auto it = index.find(label);
    if (it == index.end()) throw ValidationError(field, "unknown node id " + std::to_string(label));
    return it->second;
  };

  std::vector<LinkRecord> links;
  for (std::size_t i = 0; i < links_json.size(); ++i) {
    const std::string ctx = "links[" + std::to_string(i) + "]";
    LinkRecord l;
    l.s = lookup(required<NodeLabel>(links_json[i], "s", ctx), ctx + ".s");
    l.t = lookup(required<NodeLabel>(links_json[i], "t", ctx), ctx + ".t");
    l.quality = required<double>(links_json[i], "quality", ctx);
    links.push_back(l);
  }
  return WorkerGraph(std::move(nodes), std::move(links), lookup(requester, "requester"));
}

json graph_to_json(const WorkerGraph& graph) {
  json nodes = json::array();
  for (const NodeRecord& n : graph.nodes()) {
    nodes.push_back({{"id", n.label},
                     {"reliability", n.reliability},
                     {"resources", json(n.resources)}});
  }
  json links = json::array();
  for (const LinkRecord& l : graph.links()) {
    links.push_back({{"s", graph.node(l.s).label},
                     {"t", graph.node(l.t).label},
                     {"quality", l.quality}});
  }
  return {{"requester", graph.node(graph.requester()).label}, {"nodes", nodes}, {"links", links}};
}

WorkerGraph load_graph(const std::filesystem::path& path) {
  return graph_from_json(parse_json(read_file(path), path.string()));
}

void save_graph(const std::filesystem::path& path, const WorkerGraph& graph) {
  write_file(path, graph_to_json(graph).dump(2) + "\n");
}

StrategyTable strategies_from_json(const json& doc) {
  const auto units = optional<std::string>(doc, "units", "", "physical");
  if (units != "physical" && units != "normalized") {
    throw ValidationError("units", "expected \"physical\" or \"normalized\"");
  }
  const json& list = required_array(doc, "strategies", "");
  StrategyTable table;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ctx = "strategies[" + std::to_string(i) + "]";
    Strategy s;
    s.score = required<double>(list[i], "score", ctx);
    s.length = required<int>(list[i], "workers", ctx);
    const json& rows = required_array(list[i], "requirements", ctx);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      s.requirements.push_back(resource_row(rows[p], ctx + ".requirements[" + std::to_string(p) + "]"));
    }
    table.strategies.push_back(std::move(s));
  }
  if (units == "physical") return normalize_strategy_table(table);
  table.validate(true);
  return table;
}

StrategyTable load_strategies(const std::filesystem::path& path) {
  return strategies_from_json(parse_json(read_file(path), path.string()));
}

SessionSpec session_spec_from_json(const json& doc) {
  SessionSpec spec;
  const json& stages = required_array(doc, "stages", "");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string ctx = "stages[" + std::to_string(i) + "]";
    StageSpec s;
    s.process_time = required<double>(stages[i], "process_time", ctx);
    s.buffer_capacity = required<std::int64_t>(stages[i], "buffer_capacity", ctx);
    s.link_transfer_time = required<double>(stages[i], "link_transfer_time", ctx);
    spec.stages.push_back(s);
  }
  spec.n_packages = required<std::int64_t>(doc, "n_packages", "");
  spec.initial_feed_interval = required<double>(doc, "initial_feed_interval", "");
  spec.timeout = required<double>(doc, "timeout", "");
  spec.rate_backoff_factor = required<double>(doc, "rate_backoff_factor", "");
  spec.feed_transfer_time = optional<double>(doc, "feed_transfer_time", "", 0.0);
  spec.control_delay = optional<double>(doc, "control_delay", "", 0.0);
  spec.serialize_transfer = optional<bool>(doc, "serialize_transfer", "", false);
  spec.jitter = optional<double>(doc, "jitter", "", 0.0);
  spec.seed = optional<std::uint64_t>(doc, "seed", "", 1);
  spec.validate();
  return spec;
}

}  // namespace mopc::io
