#ifndef MBT_ENV_REWARDS_HPP_
#define MBT_ENV_REWARDS_HPP_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mbt/env/command.hpp"
#include "mbt/sim/system.hpp"

namespace mbt::env {

struct RewardWeights {
  double feet_airtime = 1.0;
  double feet_contact = 0.1;
  double feet_stance_x = 0.02;
  double feet_stance_y = 0.02;
  double feet_orientation = 0.15;
  double relative_yaw = 0.5;
  double joint_force = 0.1;
  double base_height = 0.2;
  double base_acceleration = 0.1;
  double action_difference = 0.1;
  double torque = 0.05;
  double velocity_x = 0.15;
  double velocity_y = 0.1;
  double orientation_distance = 2.0;
  double orientation_alignment = 0.15;

  double airtime_target = 0.35;  // s
  double stance_width = 0.385;   // m, left minus right foot y
};

inline constexpr int kNumLocalTerms = 11;
inline constexpr int kNumGlobalTerms = 3;

// Every term already carries its weight.
struct RewardBreakdown {
  double feet_airtime = 0.0;
  double feet_contact = 0.0;
  double feet_stance_x = 0.0;
  double feet_stance_y = 0.0;
  double feet_orientation = 0.0;
  double relative_yaw = 0.0;
  double joint_force = 0.0;
  double base_height = 0.0;
  double base_acceleration = 0.0;
  double action_difference = 0.0;
  double torque = 0.0;

  double velocity_x = 0.0;
  double velocity_y = 0.0;
  double orientation = 0.0;

  double local = 0.0;
  double global = 0.0;
  double total = 0.0;

  std::array<double, kNumLocalTerms> LocalTerms() const;
  std::array<double, kNumGlobalTerms> GlobalTerms() const;
  static const std::array<std::string, kNumLocalTerms + kNumGlobalTerms>& TermNames();
};

// Carrier yaw the command asks for, integrated from the episode start.
// Roll and pitch of the reference lie flat on the ground slope.
Quat ReferenceOrientation(const sim::Ground& ground, double reference_yaw);

// Rewards for every robot after one policy step. `actions` and
// `previous_actions` are the raw policy outputs (clipped here); `state` is the
// state after the step.
std::vector<RewardBreakdown> ComputeRewards(
    const sim::SimState& state, std::span<const sim::ActionCommand> actions,
    std::span<const sim::ActionCommand> previous_actions, const Command& command,
    const Quat& reference_orientation, const RewardWeights& weights = {});

}  // namespace mbt::env

#endif  // MBT_ENV_REWARDS_HPP_
