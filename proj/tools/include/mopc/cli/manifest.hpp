#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mopc::cli {

struct InputDigest {
  std::string path;
  std::string sha256;
};

// Everything needed to regenerate an output: the resolved configuration,
// the seed, the tool version and digests of every file that was read.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::string version;
  std::vector<InputDigest> inputs;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
};

std::string sha256_hex(std::string_view data);

}  // namespace mopc::cli
