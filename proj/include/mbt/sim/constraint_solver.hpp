#ifndef MBT_SIM_CONSTRAINT_SOLVER_HPP_
#define MBT_SIM_CONSTRAINT_SOLVER_HPP_

#include <span>
#include <vector>

#include "mbt/sim/rigid_body.hpp"

namespace mbt::sim {

// Ball joint between the carrier (body 0) and pelvis body `robot + 1`.
// Anchors are body-frame offsets from each body's centre of mass.
struct BallJoint {
  int robot = 0;
  Vec3 carrier_anchor = Vec3::Zero();
  Vec3 pelvis_anchor = Vec3::Zero();
};

struct BaumgarteGains {
  double alpha = 0.0;  // multiplies the velocity error, 1/s
  double beta = 0.0;   // multiplies the position error, 1/s^2

  static BaumgarteGains ForTimestep(double dt) {
    return {0.2 / dt, 0.2 / (dt * dt)};
  }
};

struct ConstrainedDynamics {
  // Per body, world frame.
  std::vector<Vec3> linear_acceleration;
  std::vector<Vec3> angular_acceleration;
  // Constraint force acting on the carrier at each joint, world frame. The
  // pelvis receives the opposite force.
  std::vector<Vec3> joint_force_world;
  // Same forces expressed in the carrier frame (the joint force sensor).
  std::vector<Vec3> joint_force_carrier;
  // || J a + bias ||_inf of the solved accelerations.
  double residual = 0.0;
};

// Position error of each joint, carrier anchor minus pelvis anchor (world).
std::vector<Vec3> JointPositionErrors(std::span<const RigidBodyState> bodies,
                                      std::span<const BallJoint> joints);

// Solves [M -J^T; J 0][a; lambda] = [f; -bias] with
// bias = Jdot v + alpha * Cdot + beta * C, by eliminating a through the
// block-diagonal mass matrix and factorising the joint-space matrix
// J M^-1 J^T. `wrenches` must contain one entry per body and already include
// gravity; gyroscopic terms are added here. Throws SolverError naming the
// joint when the system is singular.
ConstrainedDynamics SolveConstrainedDynamics(
    std::span<const RigidBodyState> bodies, std::span<const BallJoint> joints,
    std::span<const BodyWrench> wrenches, const BaumgarteGains& gains);

// Mass-weighted projection of poses (Gauss-Newton, `iterations` passes) and
// then twists back onto the joint constraints. Returns the largest remaining
// position error.
double ProjectToJoints(std::span<RigidBodyState> bodies,
                       std::span<const BallJoint> joints, int iterations = 1);

}  // namespace mbt::sim

#endif  // MBT_SIM_CONSTRAINT_SOLVER_HPP_
