#ifndef MBT_ENV_EPISODE_LOG_HPP_
#define MBT_ENV_EPISODE_LOG_HPP_

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mbt/common/polygon.hpp"
#include "mbt/env/command.hpp"
#include "mbt/env/rewards.hpp"
#include "mbt/env/termination.hpp"
#include "mbt/sim/system.hpp"

namespace mbt::env {

// Tab separated text, one row per policy step. Lines starting with '#' carry
// the header: format version, robot count, carrier outline and attachment
// points (both in the control-point frame). Row 0 is the state after reset.
//
// Columns: step t, control point x y z, carrier quaternion w x y z, control
// point velocity, carrier angular velocity, command vx vy omega h, then per
// robot r: pelvis x y z yaw, left foot x y, right foot x y, contacts l r,
// joint force x y z (carrier frame), reward; finally the termination name.

struct LogRobot {
  Vec3 pelvis = Vec3::Zero();
  double yaw = 0.0;
  std::array<Vec2, 2> feet{Vec2::Zero(), Vec2::Zero()};
  std::array<bool, 2> contact{false, false};
  Vec3 joint_force = Vec3::Zero();
  double reward = 0.0;
};

struct LogRecord {
  long step = 0;
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  Command command;
  std::vector<LogRobot> robots;
  std::string termination = "none";
};

struct EpisodeLog {
  int num_robots = 0;
  Polygon extent;
  std::vector<Vec2> attachments;
  std::vector<LogRecord> records;
};

// `rewards` may be empty (reset row).
LogRecord MakeLogRecord(const sim::SimState& state, const Command& command,
                        std::span<const RewardBreakdown> rewards,
                        TerminationReason termination);

EpisodeLog StartEpisodeLog(const sim::SimState& state);

void WriteLogHeader(std::ostream& out, const EpisodeLog& log);
void WriteLogRecord(std::ostream& out, const LogRecord& record);
void WriteEpisodeLog(std::ostream& out, const EpisodeLog& log);

// Throws ConfigError on a malformed log.
EpisodeLog ReadEpisodeLog(std::istream& in);

}  // namespace mbt::env

#endif  // MBT_ENV_EPISODE_LOG_HPP_
