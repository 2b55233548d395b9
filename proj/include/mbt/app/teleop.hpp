#ifndef MBT_APP_TELEOP_HPP_
#define MBT_APP_TELEOP_HPP_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mbt/env/env.hpp"
#include "mbt/eval/scenario.hpp"
#include "mbt/ppo/runner.hpp"

namespace mbt::app {

inline constexpr int kWireSchema = 1;

// {"type": "command", "seq": n, "vx": .., "vy": .., "omega": .., "h": ..}
struct CommandMessage {
  std::int64_t seq = 0;
  env::Command command;
};

// nullopt for anything that is not a well-formed command message.
std::optional<CommandMessage> ParseCommandMessage(std::string_view text);

struct TeleopOptions {
  env::EnvOptions env;
  std::uint64_t seed = 1;
};

// One live episode driven by broadcast commands. Submit may be called from
// any thread; Tick belongs to the simulation loop.
class TeleopSession {
 public:
  TeleopSession(const ppo::PolicyBundle& bundle, eval::Scenario scenario,
                TeleopOptions options = {});

  void Submit(std::string text);

  // Applies the newest pending command (highest sequence number; older or
  // repeated numbers are ignored), clamped to the command ranges, advances
  // one policy step and returns the frame. After a terminated frame the next
  // tick starts a new episode.
  nlohmann::json Tick();

  const env::Command& command() const { return command_; }
  std::int64_t last_seq() const { return last_seq_; }
  long malformed() const;
  int episode() const { return episode_; }
  long frames() const { return frames_; }
  double time() const;  // s of simulated time over all frames
  const env::Env& env() const { return env_; }

 private:
  void StartEpisode();
  nlohmann::json Frame(const env::StepResult& step) const;

  const ppo::PolicyBundle* bundle_;
  eval::Scenario scenario_;
  TeleopOptions options_;
  env::Env env_;
  ppo::PolicyRunner runner_;
  std::vector<env::Observation> obs_;
  env::Command command_;
  std::int64_t last_seq_ = -1;
  int episode_ = 0;
  long frames_ = 0;
  bool restart_ = false;

  mutable std::mutex inbox_mutex_;
  std::vector<std::string> inbox_;
  long malformed_ = 0;
};

}  // namespace mbt::app

#endif  // MBT_APP_TELEOP_HPP_
