#ifndef MBT_SIM_LEGS_HPP_
#define MBT_SIM_LEGS_HPP_

#include <array>

#include "mbt/common/math.hpp"

namespace mbt::sim {

struct SimState;

inline constexpr int kActionDim = 10;
inline constexpr int kActionsPerLeg = 5;
enum FootIndex : int { kLeftFoot = 0, kRightFoot = 1 };

// Per-leg layout: [dF_x, dF_y, dF_z, dp_x, dp_y], left leg first. Force
// deltas are in the pelvis heading frame.
using ActionCommand = std::array<double, kActionDim>;

struct FootState {
  Vec3 position = Vec3::Zero();  // world
  bool in_stance = true;
  double phase = 0.0;            // oscillator phase in [0, 1)
  double airtime = 0.0;          // s since liftoff, 0 while in stance
  bool touchdown = false;        // touched down during the current policy step
  double touchdown_airtime = 0.0;
  Vec3 commanded_grf = Vec3::Zero();
  Vec3 liftoff_position = Vec3::Zero();
};

struct LegState {
  std::array<FootState, 2> feet;
  double clock = 0.0;  // phase of the left foot; the right foot runs at +0.5
  double height_setpoint = 0.8;

  int NumContacts() const {
    return static_cast<int>(feet[0].in_stance) +
           static_cast<int>(feet[1].in_stance);
  }
};

struct LegParams {
  double hip_half_width = 0.1925;
  double max_leg_length = 1.2;
  double gait_frequency = 1.25;  // Hz
  double duty = 0.5;
  double min_airtime = 0.1;      // s before a lifted foot may land again
  double swing_height = 0.12;
  double max_normal_force = 1200.0;
  Vec3 force_scale = Vec3(80.0, 80.0, 200.0);
  double placement_scale = 0.3;
  // Virtual leg impedance on pelvis height, per robot.
  double height_stiffness = 8000.0;
  double height_damping = 1200.0;
  double height_slew_rate = 0.25;  // m/s
  // Stance-leg posture servo on pelvis roll/pitch.
  double posture_stiffness = 3000.0;
  double posture_damping = 300.0;
  double yaw_friction = 10.0;  // per stance foot, N m s/rad
  double stance_drag = 25.0;   // horizontal, per stance foot, N s/m
  double friction = 1.0;

  double StanceTime() const { return duty / gait_frequency; }
  double SwingTime() const { return (1.0 - duty) / gait_frequency; }
};

struct LegStepResult {
  std::array<Vec3, 2> grf{Vec3::Zero(), Vec3::Zero()};
  Vec3 stabilizing_torque = Vec3::Zero();  // world, applied to the pelvis
  LegState legs;
};

ActionCommand ClipAction(const ActionCommand& action);

// Clips the normal component to [0, max_normal] and scales the tangential
// component onto the cone ||F_t|| <= mu F_n, preserving its direction.
Vec3 ProjectToFrictionCone(const Vec3& force, const Vec3& normal, double mu,
                           double max_normal);

// Advances the gait oscillator of one robot by `dt`, places or lifts feet and
// returns the ground reaction forces of the stance feet.
LegStepResult StepLegs(SimState& state, int robot, const ActionCommand& action,
                       double dt);

}  // namespace mbt::sim

#endif  // MBT_SIM_LEGS_HPP_
