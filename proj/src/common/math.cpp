#include "mbt/common/math.hpp"

#include <algorithm>
#include <cmath>

namespace mbt {

double WrapAngle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Vec3 RollPitchYaw(const Quat& q) {
  const Mat3 r = q.normalized().toRotationMatrix();
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

Quat FromRollPitchYaw(double roll, double pitch, double yaw) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
              Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

double Yaw(const Quat& q) {
  const Vec3 x_axis = q * Vec3::UnitX();
  return std::atan2(x_axis.y(), x_axis.x());
}

Quat YawRotation(double yaw) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
}

double GeodesicAngle(const Quat& a, const Quat& b) {
  // atan2 form stays accurate near 0 where acos of the dot product does not.
  const Quat rel = a.normalized().conjugate() * b.normalized();
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

Mat3 Skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

Quat IntegrateOrientation(const Quat& q, const Vec3& omega_world, double dt) {
  const double angle = omega_world.norm() * dt;
  Quat delta = Quat::Identity();
  if (angle > 0.0) {
    delta = Quat(Eigen::AngleAxisd(angle, omega_world.normalized()));
  }
  Quat out = delta * q;
  out.normalize();
  return out;
}

}  // namespace mbt
