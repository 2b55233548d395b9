#ifndef MBT_COMMON_MATH_HPP_
#define MBT_COMMON_MATH_HPP_

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <numbers>

namespace mbt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGravity = 9.81;

inline constexpr double Deg2Rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double Rad2Deg(double rad) { return rad * 180.0 / kPi; }

// Wraps to (-pi, pi].
double WrapAngle(double angle);

// Intrinsic Z-Y-X (yaw, pitch, roll) decomposition, returned as
// (roll, pitch, yaw).
Vec3 RollPitchYaw(const Quat& q);
Quat FromRollPitchYaw(double roll, double pitch, double yaw);

// Heading of the body x-axis projected onto the world xy-plane.
double Yaw(const Quat& q);
Quat YawRotation(double yaw);

// Rotation angle between two orientations, in [0, pi].
double GeodesicAngle(const Quat& a, const Quat& b);

Mat3 Skew(const Vec3& v);

// q <- exp(omega_world * dt) * q, renormalised.
Quat IntegrateOrientation(const Quat& q, const Vec3& omega_world, double dt);

}  // namespace mbt

#endif  // MBT_COMMON_MATH_HPP_
