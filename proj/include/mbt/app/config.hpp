#ifndef MBT_APP_CONFIG_HPP_
#define MBT_APP_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbt/ppo/config.hpp"

namespace mbt::app {

struct EvalSection {
  int episodes = 100;
  int workers = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> scenarios{"rect-4"};
  std::vector<std::string> commands{"hold-still", "forward", "sideways", "turn"};
  std::vector<double> perturbations{0.0};
  std::vector<double> payloads;  // empty keeps each scenario's default
  int logged_episodes = 1;
};

struct TeleopSection {
  int port = 8080;
  std::string static_dir = "ui";
  std::string scenario = "triangle";
  std::uint64_t seed = 1;
  bool randomize_dynamics = false;
  int max_pending_frames = 8;  // per subscriber; older frames are dropped
};

struct AppConfig {
  ppo::TrainerConfig train;
  EvalSection eval;
  TeleopSection teleop;
};

inline constexpr const char* kPortEnv = "MBT_PORT";

nlohmann::json ConfigToJson(const AppConfig& config);

// Overlays `user` on the defaults. Unknown keys, wrong types and invalid
// values throw ConfigError naming the offending key.
AppConfig ConfigFromJson(const nlohmann::json& user);
AppConfig LoadConfig(const std::filesystem::path& path);

// Rejects out-of-range settings (non-positive counts, bad stage range...).
void ValidateConfig(const AppConfig& config);

// Port from the environment variable when set, else the configured one.
int ResolvePort(const TeleopSection& teleop);

// Attachment configuration file: {"attachments": [[R, theta], ...],
// "bar_mass": kg, "extent": [[x, y], ...], "bars": [[i, j], ...]}.
nlohmann::json AttachmentToJson(const sim::AttachmentConfig& config);
sim::AttachmentConfig AttachmentFromJson(const nlohmann::json& j);

}  // namespace mbt::app

#endif  // MBT_APP_CONFIG_HPP_
