#include "mbt/sim/legs.hpp"

#include <algorithm>
#include <cmath>

#include "mbt/sim/system.hpp"

namespace mbt::sim {

ActionCommand ClipAction(const ActionCommand& action) {
  ActionCommand out;
  for (int k = 0; k < kActionDim; ++k) {
    // NaN maps to 0 so a broken policy output cannot poison the simulator.
    const double a = std::isnan(action[k]) ? 0.0 : action[k];
    out[k] = std::clamp(a, -1.0, 1.0);
  }
  return out;
}

Vec3 ProjectToFrictionCone(const Vec3& force, const Vec3& normal, double mu,
                           double max_normal) {
  const double fn = std::clamp(force.dot(normal), 0.0, max_normal);
  Vec3 tangential = force - force.dot(normal) * normal;
  const double ft = tangential.norm();
  const double limit = mu * fn;
  if (ft > limit) {
    tangential = ft > 0.0 ? Vec3(tangential * (limit / ft)) : Vec3(Vec3::Zero());
  }
  return fn * normal + tangential;
}

LegStepResult StepLegs(SimState& state, int robot,
                       const ActionCommand& raw_action, double dt) {
  const ActionCommand a = ClipAction(raw_action);
  const LegParams& lp = state.params.legs;
  const RandomizedDynamics& rd = state.dynamics;
  LegState& legs = state.legs[robot];
  const RigidBodyState& pelvis = state.Pelvis(robot);
  const bool hold = state.gait.hold_still;

  // Slew the height set point towards the command.
  const double max_change = lp.height_slew_rate * dt;
  legs.height_setpoint +=
      std::clamp(state.gait.height - legs.height_setpoint, -max_change, max_change);
  legs.clock = std::fmod(legs.clock + lp.gait_frequency * dt, 1.0);

  const Quat heading = YawRotation(Yaw(pelvis.orientation));
  const Vec3 anchor = state.PelvisPosition(robot);
  const Vec3 anchor_vel = state.PelvisVelocity(robot);
  const double height = anchor.z() - state.ground.HeightBelow(anchor);
  const double reach =
      0.95 * std::sqrt(std::max(lp.max_leg_length * lp.max_leg_length -
                                    height * height,
                                0.0));

  for (int f = 0; f < 2; ++f) {
    FootState& foot = legs.feet[f];
    foot.phase = std::fmod(legs.clock + 0.5 * f, 1.0);
    const Vec3 hip = state.HipPosition(robot, f);
    const int base = kActionsPerLeg * f;

    // Raibert-style placement: half the stance-time travel ahead of the hip,
    // shifted by the policy's placement offset.
    Vec3 offset = 0.5 * lp.StanceTime() * Vec3(anchor_vel.x(), anchor_vel.y(), 0.0) +
                  heading * Vec3(a[base + 3] * lp.placement_scale,
                                 a[base + 4] * lp.placement_scale, 0.0);
    offset.z() = 0.0;
    if (offset.norm() > reach) offset *= reach / offset.norm();
    Vec3 target = hip + offset;
    target.z() = state.ground.HeightBelow(target);

    const bool want_stance = hold || foot.phase < lp.duty;
    if (foot.in_stance) {
      const double leg_length = (hip - foot.position).norm();
      if (leg_length > lp.max_leg_length || !want_stance) {
        foot.in_stance = false;
        foot.airtime = 0.0;
        foot.liftoff_position = foot.position;
      }
    } else {
      foot.airtime += dt;
      const bool land = want_stance && foot.airtime >= lp.min_airtime;
      if (land) {
        foot.position = target;
        foot.in_stance = true;
        foot.touchdown = true;
        foot.touchdown_airtime = foot.airtime;
        foot.airtime = 0.0;
      } else {
        const double s = std::clamp(foot.airtime / lp.SwingTime(), 0.0, 1.0);
        foot.position = (1.0 - s) * foot.liftoff_position + s * target;
        foot.position.z() += 4.0 * s * (1.0 - s) * lp.swing_height;
      }
    }
  }

  LegStepResult result;
  const int contacts = legs.NumContacts();
  if (contacts > 0) {
    const double support =
        state.SupportShareWeight() +
        lp.height_stiffness * (legs.height_setpoint - height) -
        lp.height_damping * rd.damping_multiplier * anchor_vel.z();
    const double mu = lp.friction * rd.friction_multiplier;
    const Vec3 normal = state.ground.Normal();
    for (int f = 0; f < 2; ++f) {
      FootState& foot = legs.feet[f];
      if (!foot.in_stance) {
        foot.commanded_grf.setZero();
        continue;
      }
      const int base = kActionsPerLeg * f;
      const Vec3 delta = heading * Vec3(a[base + 0] * lp.force_scale.x(),
                                        a[base + 1] * lp.force_scale.y(),
                                        a[base + 2] * lp.force_scale.z());
      const Vec3 nominal(-lp.stance_drag * anchor_vel.x(),
                         -lp.stance_drag * anchor_vel.y(), support / contacts);
      foot.commanded_grf = ProjectToFrictionCone(nominal + delta, normal, mu,
                                                 lp.max_normal_force);
      result.grf[f] = foot.commanded_grf;
    }

    const Vec3 up = Vec3::UnitZ();
    const Vec3 body_up = pelvis.orientation * up;
    const Vec3& w = pelvis.angular_velocity;
    const Vec3 w_tilt = w - w.dot(up) * up;
    result.stabilizing_torque =
        lp.posture_stiffness * body_up.cross(up) -
        lp.posture_damping * rd.damping_multiplier * w_tilt -
        lp.yaw_friction * rd.friction_multiplier * contacts * w.dot(up) * up;
  } else {
    for (FootState& foot : legs.feet) foot.commanded_grf.setZero();
  }
  result.legs = legs;
  return result;
}

}  // namespace mbt::sim
