#ifndef MBT_SIM_RIGID_BODY_HPP_
#define MBT_SIM_RIGID_BODY_HPP_

#include "mbt/common/math.hpp"

namespace mbt::sim {

// 6-DOF state of a rigid body tracked at its centre of mass. Angular
// velocity is expressed in the world frame; inertia in the body frame.
struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double mass = 1.0;
  Mat3 inertia = Mat3::Identity();

  Mat3 Rotation() const { return orientation.toRotationMatrix(); }
  Mat3 WorldInertia() const {
    const Mat3 r = Rotation();
    return r * inertia * r.transpose();
  }
  // `local` is a body-frame offset from the centre of mass.
  Vec3 PointWorld(const Vec3& local) const { return position + orientation * local; }
  Vec3 PointVelocity(const Vec3& local) const {
    return linear_velocity + angular_velocity.cross(orientation * local);
  }
  bool IsFinite() const {
    return position.allFinite() && orientation.coeffs().allFinite() &&
           linear_velocity.allFinite() && angular_velocity.allFinite();
  }
};

// Force and torque about the centre of mass, world frame.
struct BodyWrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  void AddForceAtPoint(const Vec3& f, const Vec3& lever) {
    force += f;
    torque += lever.cross(f);
  }
};

}  // namespace mbt::sim

#endif  // MBT_SIM_RIGID_BODY_HPP_
