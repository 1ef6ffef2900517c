#include "qmoves_app/run_manifest.hpp"

#include <cstdint>
#include <cstdlib>
#include <ctime>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "qmoves_app/json_io.hpp"

namespace qmoves::app {

nlohmann::json RunManifest::to_json() const
{
  return {{"command", command}, {"config", config},         {"inputs", inputs}, {"outputs", outputs},
          {"wall_seconds", wall_seconds}, {"version", version}, {"rng", rng}};
}

void RunManifest::write(const std::filesystem::path& dir) const { write_json_file(dir / kManifestName, to_json()); }

std::filesystem::path state_dir()
{
  if (const char* env = std::getenv("QMOVES_STATE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::path("qmoves_state");
}

std::string config_hash(const nlohmann::json& config)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h).substr(0, 8);
}

std::filesystem::path make_run_dir(const std::filesystem::path& base, const nlohmann::json& config)
{
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  const std::string stem = fmt::format("{:%Y%m%dT%H%M%SZ}-{}", utc, config_hash(config));
  std::filesystem::create_directories(base);
  for (int i = 1;; ++i) {
    auto dir = base / (i == 1 ? stem : fmt::format("{}-{}", stem, i));
    if (std::filesystem::create_directory(dir)) {
      return dir;
    }
  }
}

} // namespace qmoves::app
