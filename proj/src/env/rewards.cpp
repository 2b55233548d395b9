#include "mbt/env/rewards.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"
#include "mbt/env/observation.hpp"

namespace mbt::env {

std::array<double, kNumLocalTerms> RewardBreakdown::LocalTerms() const {
  return {feet_airtime,      feet_contact, feet_stance_x,     feet_stance_y,
          feet_orientation,  relative_yaw, joint_force,       base_height,
          base_acceleration, action_difference, torque};
}

std::array<double, kNumGlobalTerms> RewardBreakdown::GlobalTerms() const {
  return {velocity_x, velocity_y, orientation};
}

const std::array<std::string, kNumLocalTerms + kNumGlobalTerms>&
RewardBreakdown::TermNames() {
  static const std::array<std::string, kNumLocalTerms + kNumGlobalTerms> names{
      "feet_airtime",     "feet_contact",      "feet_stance_x", "feet_stance_y",
      "feet_orientation", "relative_yaw",      "joint_force",   "base_height",
      "base_acceleration", "action_difference", "torque",        "velocity_x",
      "velocity_y",       "orientation"};
  return names;
}

Quat ReferenceOrientation(const sim::Ground& ground, double reference_yaw) {
  return ground.Aligned(reference_yaw);
}

std::vector<RewardBreakdown> ComputeRewards(
    const sim::SimState& state, std::span<const sim::ActionCommand> actions,
    std::span<const sim::ActionCommand> previous_actions, const Command& command,
    const Quat& reference_orientation, const RewardWeights& w) {
  const int n = state.NumRobots();
  if (static_cast<int>(actions.size()) != n ||
      static_cast<int>(previous_actions.size()) != n) {
    throw ShapeError("ComputeRewards: one action per robot required");
  }
  const bool hold = command.IsHoldStill();

  // Carrier terms, shared by all robots.
  const Quat heading = YawRotation(Yaw(state.CarrierOrientation()));
  const Vec3 v = heading.inverse() * state.ControlPointVelocity();
  const double q_d =
      GeodesicAngle(state.CarrierOrientation(), reference_orientation) / kPi;
  RewardBreakdown shared;
  shared.velocity_x = w.velocity_x * std::exp(-2.0 * std::abs(v.x() - command.vx));
  shared.velocity_y = w.velocity_y * std::exp(-2.0 * std::abs(v.y() - command.vy));
  shared.orientation = w.orientation_distance * -q_d +
                       w.orientation_alignment * std::exp(-30.0 * q_d);
  shared.global = shared.velocity_x + shared.velocity_y + shared.orientation;

  std::vector<RewardBreakdown> out(n, shared);
  for (int r = 0; r < n; ++r) {
    RewardBreakdown& b = out[r];
    const sim::LegState& legs = state.legs[r];
    const int contacts = legs.NumContacts();

    double airtime = 0.0;
    for (const sim::FootState& foot : legs.feet) {
      if (foot.touchdown) airtime += std::abs(foot.touchdown_airtime - w.airtime_target);
    }
    b.feet_airtime = w.feet_airtime * (hold ? 0.0 : airtime);

    b.feet_contact = w.feet_contact *
                     (hold ? (contacts == 2 ? 1.0 : 0.0) + 0.5 * (contacts == 1 ? 1.0 : 0.0)
                           : (contacts == 1 ? 1.0 : 0.0));

    const Vec3 left = FootInPelvisFrame(state, r, sim::kLeftFoot);
    const Vec3 right = FootInPelvisFrame(state, r, sim::kRightFoot);
    b.feet_stance_x =
        w.feet_stance_x * (hold ? std::exp(-10.0 * std::abs(left.x() - right.x())) : 1.0);
    b.feet_stance_y =
        w.feet_stance_y *
        (hold ? std::exp(-5.0 * std::abs(left.y() - right.y() - w.stance_width)) : 1.0);

    // Feet carry the pelvis orientation in this model, so the distance is 0.
    b.feet_orientation = w.feet_orientation * std::exp(-30.0 * 0.0);

    b.relative_yaw = w.relative_yaw * -std::abs(RelativeYaw(state, r)) / kPi;

    const Vec3& force = state.joint_force[r];
    b.joint_force = w.joint_force *
                    (hold && n > 1 ? std::exp(-0.2 * force.head<2>().norm()) : 1.0);

    b.base_height = w.base_height * -std::abs(state.PelvisHeight(r) - command.h);

    b.base_acceleration =
        w.base_acceleration * std::exp(-0.01 * state.base_acceleration[r].lpNorm<1>());

    const sim::ActionCommand a = sim::ClipAction(actions[r]);
    const sim::ActionCommand a_prev = sim::ClipAction(previous_actions[r]);
    double change = 0.0;
    double effort = 0.0;
    for (int k = 0; k < sim::kActionDim; ++k) {
      change += std::abs(a[k] - a_prev[k]);
      effort += std::abs(a[k]);
    }
    b.action_difference = w.action_difference * std::exp(-8.0 * change);
    b.torque = w.torque * std::exp(-effort);

    b.local = 0.0;
    for (double term : b.LocalTerms()) b.local += term;
    b.total = b.local + b.global;
  }
  return out;
}

}  // namespace mbt::env
