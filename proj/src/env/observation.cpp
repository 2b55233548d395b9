#include "mbt/env/observation.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"

namespace mbt::env {

double RelativeYaw(const sim::SimState& state, int robot) {
  return WrapAngle(Yaw(state.PelvisOrientation(robot)) - Yaw(state.CarrierOrientation()));
}

Vec3 FootInPelvisFrame(const sim::SimState& state, int robot, int foot) {
  const Vec3& p = state.legs[robot].feet[foot].position;
  return state.PelvisOrientation(robot).inverse() * (p - state.PelvisPosition(robot));
}

Observation Observe(const sim::SimState& state, int robot, const Command& command,
                    Rng& noise_rng, double noise_std) {
  if (robot < 0 || robot >= state.NumRobots()) {
    throw ShapeError("Observe: robot index out of range");
  }
  const double sigma = std::abs(noise_std);
  const Quat q = state.PelvisOrientation(robot);
  const Quat q_inv = q.inverse();
  const sim::RigidBodyState& pelvis = state.Pelvis(robot);
  const sim::LegState& legs = state.legs[robot];

  Observation o{};
  const Vec3 rpy = RollPitchYaw(q);
  o[obs::kRollPitch + 0] = rpy[0] + Normal(noise_rng, 0.0, sigma);
  o[obs::kRollPitch + 1] = rpy[1] + Normal(noise_rng, 0.0, sigma);
  const Vec3 w = q_inv * pelvis.angular_velocity;
  const Vec3 v = q_inv * state.PelvisVelocity(robot);
  for (int k = 0; k < 3; ++k) {
    o[obs::kAngularVelocity + k] = w[k];
    o[obs::kLinearVelocity + k] = v[k];
  }
  o[obs::kHeight] = state.PelvisHeight(robot);
  for (int f = 0; f < 2; ++f) {
    const Vec3 p = FootInPelvisFrame(state, robot, f);
    for (int k = 0; k < 3; ++k) {
      o[obs::kFeet + 3 * f + k] = p[k] + Normal(noise_rng, 0.0, sigma);
    }
    o[obs::kContacts + f] = legs.feet[f].in_stance ? 1.0 : 0.0;
  }
  o[obs::kClock + 0] = std::sin(2.0 * kPi * legs.clock);
  o[obs::kClock + 1] = std::cos(2.0 * kPi * legs.clock);
  const sim::Attachment& a = state.config.attachments[robot];
  o[obs::kAttachment + 0] = a.radius;
  o[obs::kAttachment + 1] = a.radius == 0.0 ? 0.0 : a.angle;
  o[obs::kRelativeYaw] = RelativeYaw(state, robot);
  o[obs::kCommand + 0] = command.vx;
  o[obs::kCommand + 1] = command.vy;
  o[obs::kCommand + 2] = command.omega;
  o[obs::kCommand + 3] = command.h;
  return o;
}

}  // namespace mbt::env
