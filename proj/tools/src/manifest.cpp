#include "mopc/cli/manifest.hpp"

#include <array>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace mopc::cli {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json inputs_json = nlohmann::json::array();
  for (const InputDigest& d : inputs) inputs_json.push_back({{"path", d.path}, {"sha256", d.sha256}});
  return {{"subcommand", subcommand},
          {"argv", argv},
          {"config", config},
          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
          {"version", version},
          {"inputs", inputs_json},
          {"outputs", outputs}};
}

}  // namespace mopc::cli
