#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qmoves::app {

inline constexpr const char* kArtifactVersion = "0.3.0";
inline constexpr const char* kManifestName = "manifest.json";

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::string version = kArtifactVersion;
  std::vector<std::string> rng;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& dir) const;
};

/// QMOVES_STATE_DIR when set, else ./qmoves_state.
std::filesystem::path state_dir();

/// First 8 hex digits of the FNV-1a hash of the compact JSON dump.
std::string config_hash(const nlohmann::json& config);

/// Creates <base>/<UTC timestamp>-<config hash>, adding -2, -3, ... on collision.
std::filesystem::path make_run_dir(const std::filesystem::path& base, const nlohmann::json& config);

class Stopwatch {
public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace qmoves::app
