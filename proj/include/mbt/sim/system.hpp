#ifndef MBT_SIM_SYSTEM_HPP_
#define MBT_SIM_SYSTEM_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbt/sim/constraint_solver.hpp"
#include "mbt/sim/legs.hpp"
#include "mbt/sim/perturbation.hpp"
#include "mbt/sim/randomization.hpp"
#include "mbt/sim/rigid_body.hpp"
#include "mbt/sim/scene.hpp"

namespace mbt::sim {

struct SimParams {
  double policy_dt = 0.02;
  int substeps = 10;
  double pelvis_mass = 31.0;
  Vec3 pelvis_inertia = Vec3(2.0, 2.0, 1.0);
  double mount_mass = 1.0;          // per attachment point
  double carrier_min_inertia = 0.5;  // added on every carrier axis
  double joint_damping = 30.0;      // ball-joint viscous friction, N m s/rad
  double com_reference_length = 1.0;
  LegParams legs;

  double SubstepDt() const { return policy_dt / substeps; }
};

// Infinite plane z = tan(slope) * x.
struct Ground {
  double slope = 0.0;

  double Height(double x) const;
  double HeightBelow(const Vec3& p) const { return Height(p.x()); }
  Vec3 Normal() const;
  // Carrier orientation that lies flat on the slope with the given heading.
  Quat Aligned(double yaw) const;
};

// What the gait layer needs from the carrier command.
struct GaitCommand {
  bool hold_still = true;
  double height = 0.8;
};

struct DynamicPayloadState {
  DynamicPayload spec;
  Vec2 local_position = Vec2::Zero();  // control-point frame
  Vec2 local_velocity = Vec2::Zero();  // relative to the carrier surface
  Vec3 carrier_force = Vec3::Zero();   // force the ball exerts, world
  Vec3 pending_impulse = Vec3::Zero();
};

struct SimState {
  SimParams params;
  AttachmentConfig config;
  PayloadSpec payload;
  RandomizedDynamics dynamics;
  Ground ground;

  // bodies[0] is the carrier, bodies[r + 1] the pelvis of robot r.
  std::vector<RigidBodyState> bodies;
  Vec3 carrier_com_local = Vec3::Zero();  // COM in the control-point frame
  std::vector<Vec3> pelvis_com_local;     // COM relative to the joint anchor
  std::vector<BallJoint> joints;
  std::vector<LegState> legs;
  std::optional<DynamicPayloadState> ball;
  GaitCommand gait;

  long step = 0;
  std::vector<Vec3> joint_force;                // carrier frame, last substep
  std::vector<std::array<Vec3, 2>> grf;         // world, last substep
  std::vector<Vec3> base_acceleration;          // over the last policy step
  std::vector<double> robot_power;              // mean sum |F . v| last step
  double solver_residual = 0.0;

  int NumRobots() const { return static_cast<int>(joints.size()); }
  double Time() const { return static_cast<double>(step) * params.policy_dt; }

  const RigidBodyState& Carrier() const { return bodies[0]; }
  const RigidBodyState& Pelvis(int r) const { return bodies[r + 1]; }

  Vec3 ControlPointPosition() const;
  Vec3 ControlPointVelocity() const;
  Quat CarrierOrientation() const { return bodies[0].orientation; }
  Vec3 CarrierAngularVelocity() const { return bodies[0].angular_velocity; }
  // Carrier point given in control-point coordinates.
  Vec3 CarrierPointWorld(const Vec3& local) const;

  // Pelvis frame origin, i.e. the pelvis side of the ball joint.
  Vec3 PelvisPosition(int r) const;
  Vec3 PelvisVelocity(int r) const;
  Quat PelvisOrientation(int r) const { return bodies[r + 1].orientation; }
  double PelvisHeight(int r) const;
  Vec3 AttachmentWorld(int r) const;
  Vec3 HipPosition(int r, int foot) const;

  double DynamicPayloadMass() const { return ball ? ball->spec.mass : 0.0; }
  double TotalWeight() const;
  // Nominal vertical support of one robot: own weight plus an equal share of
  // the carrier and payload.
  double SupportShareWeight() const;
  double MaxJointResidual() const;
  double Power() const;

  std::string DebugDump() const;
};

SimState BuildSystem(const AttachmentConfig& config, const PayloadSpec& payload,
                     const RandomizedDynamics& dynamics,
                     const SimParams& params = {}, double initial_height = 0.8,
                     double initial_yaw = 0.0);

// Sum over stance feet of |GRF . pelvis velocity| for one robot.
double StancePower(const std::array<Vec3, 2>& grf, const std::array<bool, 2>& stance,
                   const Vec3& pelvis_velocity);

// Advances one policy step (params.substeps physics substeps). `actions` has
// one entry per robot. Throws NumericalFault on divergence.
void SimStep(SimState& state, std::span<const ActionCommand> actions,
             std::span<const PerturbationSpec> perturbations);

}  // namespace mbt::sim

#endif  // MBT_SIM_SYSTEM_HPP_
