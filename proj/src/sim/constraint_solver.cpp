#include "mbt/sim/constraint_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbt/common/errors.hpp"

namespace mbt::sim {
namespace {

struct InverseMass {
  double inv_mass = 0.0;
  Mat3 inv_inertia = Mat3::Zero();  // world frame
};

InverseMass Invert(const RigidBodyState& body) {
  InverseMass out;
  if (std::isinf(body.mass)) return out;  // kinematically fixed
  out.inv_mass = 1.0 / body.mass;
  const Mat3 r = body.Rotation();
  out.inv_inertia = r * body.inertia.inverse() * r.transpose();
  return out;
}

// First joint whose rows make the leading block of `a` lose rank.
int FindSingularJoint(const Eigen::MatrixXd& a, int num_joints) {
  for (int j = 0; j < num_joints; ++j) {
    const int n = 3 * (j + 1);
    Eigen::LLT<Eigen::MatrixXd> llt(a.topLeftCorner(n, n));
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) return j;
  }
  return num_joints - 1;
}

// Rows 3j..3j+2 hold d(carrier anchor - pelvis anchor)/d(twist).
Eigen::MatrixXd JointJacobian(std::span<const RigidBodyState> bodies,
                              std::span<const BallJoint> joints) {
  const int nb = static_cast<int>(bodies.size());
  const int nj = static_cast<int>(joints.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * nj, 6 * nb);
  const RigidBodyState& carrier = bodies[0];
  for (int j = 0; j < nj; ++j) {
    const BallJoint& joint = joints[j];
    const int pb = joint.robot + 1;
    if (pb <= 0 || pb >= nb) {
      throw ShapeError("ball joint references a missing pelvis body");
    }
    const Vec3 r0 = carrier.orientation * joint.carrier_anchor;
    const Vec3 r1 = bodies[pb].orientation * joint.pelvis_anchor;
    jac.block<3, 3>(3 * j, 0) = Mat3::Identity();
    jac.block<3, 3>(3 * j, 3) = -Skew(r0);
    jac.block<3, 3>(3 * j, 6 * pb) = -Mat3::Identity();
    jac.block<3, 3>(3 * j, 6 * pb + 3) = Skew(r1);
  }
  return jac;
}

Eigen::MatrixXd InverseMassTimes(const std::vector<InverseMass>& inv,
                                 const Eigen::MatrixXd& jac) {
  const int nb = static_cast<int>(inv.size());
  Eigen::MatrixXd minv_jt(6 * nb, jac.rows());
  for (int b = 0; b < nb; ++b) {
    minv_jt.middleRows<3>(6 * b) =
        inv[b].inv_mass * jac.middleCols<3>(6 * b).transpose();
    minv_jt.middleRows<3>(6 * b + 3) =
        inv[b].inv_inertia * jac.middleCols<3>(6 * b + 3).transpose();
  }
  return minv_jt;
}

}  // namespace

std::vector<Vec3> JointPositionErrors(std::span<const RigidBodyState> bodies,
                                      std::span<const BallJoint> joints) {
  std::vector<Vec3> errors;
  errors.reserve(joints.size());
  for (const BallJoint& joint : joints) {
    const RigidBodyState& carrier = bodies[0];
    const RigidBodyState& pelvis = bodies[joint.robot + 1];
    errors.push_back(carrier.PointWorld(joint.carrier_anchor) -
                     pelvis.PointWorld(joint.pelvis_anchor));
  }
  return errors;
}

ConstrainedDynamics SolveConstrainedDynamics(
    std::span<const RigidBodyState> bodies, std::span<const BallJoint> joints,
    std::span<const BodyWrench> wrenches, const BaumgarteGains& gains) {
  const int nb = static_cast<int>(bodies.size());
  const int nj = static_cast<int>(joints.size());
  if (static_cast<int>(wrenches.size()) != nb) {
    throw ShapeError("SolveConstrainedDynamics: one wrench per body required");
  }

  // Unconstrained accelerations.
  std::vector<InverseMass> inv(nb);
  Eigen::VectorXd a0(6 * nb);
  for (int b = 0; b < nb; ++b) {
    const RigidBodyState& body = bodies[b];
    inv[b] = Invert(body);
    const Vec3 gyro =
        body.angular_velocity.cross(body.WorldInertia() * body.angular_velocity);
    a0.segment<3>(6 * b) = inv[b].inv_mass * wrenches[b].force;
    a0.segment<3>(6 * b + 3) = inv[b].inv_inertia * (wrenches[b].torque - gyro);
  }

  ConstrainedDynamics out;
  out.linear_acceleration.resize(nb);
  out.angular_acceleration.resize(nb);
  out.joint_force_world.assign(nj, Vec3::Zero());
  out.joint_force_carrier.assign(nj, Vec3::Zero());

  if (nj == 0) {
    for (int b = 0; b < nb; ++b) {
      out.linear_acceleration[b] = a0.segment<3>(6 * b);
      out.angular_acceleration[b] = a0.segment<3>(6 * b + 3);
    }
    return out;
  }

  const Eigen::MatrixXd jac = JointJacobian(bodies, joints);
  Eigen::VectorXd bias(3 * nj);
  const RigidBodyState& carrier = bodies[0];
  for (int j = 0; j < nj; ++j) {
    const BallJoint& joint = joints[j];
    const RigidBodyState& pelvis = bodies[joint.robot + 1];
    const Vec3 r0 = carrier.orientation * joint.carrier_anchor;
    const Vec3 r1 = pelvis.orientation * joint.pelvis_anchor;
    const Vec3& w0 = carrier.angular_velocity;
    const Vec3& w1 = pelvis.angular_velocity;
    const Vec3 c = (carrier.position + r0) - (pelvis.position + r1);
    const Vec3 c_dot = (carrier.linear_velocity + w0.cross(r0)) -
                       (pelvis.linear_velocity + w1.cross(r1));
    const Vec3 jdot_v = w0.cross(w0.cross(r0)) - w1.cross(w1.cross(r1));
    bias.segment<3>(3 * j) = jdot_v + gains.alpha * c_dot + gains.beta * c;
  }

  const Eigen::MatrixXd minv_jt = InverseMassTimes(inv, jac);
  const Eigen::MatrixXd schur = jac * minv_jt;
  const Eigen::VectorXd rhs = -(jac * a0 + bias);

  Eigen::LLT<Eigen::MatrixXd> llt(schur);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    const int bad = FindSingularJoint(schur, nj);
    throw SolverError("singular KKT matrix at ball joint of robot " +
                      std::to_string(joints[bad].robot));
  }
  const Eigen::VectorXd lambda = llt.solve(rhs);
  const Eigen::VectorXd accel = a0 + minv_jt * lambda;

  for (int b = 0; b < nb; ++b) {
    out.linear_acceleration[b] = accel.segment<3>(6 * b);
    out.angular_acceleration[b] = accel.segment<3>(6 * b + 3);
  }
  const Mat3 carrier_rot_t = carrier.Rotation().transpose();
  for (int j = 0; j < nj; ++j) {
    out.joint_force_world[j] = lambda.segment<3>(3 * j);
    out.joint_force_carrier[j] = carrier_rot_t * out.joint_force_world[j];
  }
  out.residual = (jac * accel + bias).lpNorm<Eigen::Infinity>();
  return out;
}

double ProjectToJoints(std::span<RigidBodyState> bodies,
                       std::span<const BallJoint> joints, int iterations) {
  const int nb = static_cast<int>(bodies.size());
  const int nj = static_cast<int>(joints.size());
  if (nj == 0) return 0.0;
  auto max_error = [&] {
    double worst = 0.0;
    for (const Vec3& e : JointPositionErrors(bodies, joints)) {
      worst = std::max(worst, e.norm());
    }
    return worst;
  };
  auto apply = [&](const Eigen::VectorXd& delta, bool positions) {
    for (int b = 0; b < nb; ++b) {
      RigidBodyState& body = bodies[b];
      const Vec3 lin = delta.segment<3>(6 * b);
      const Vec3 ang = delta.segment<3>(6 * b + 3);
      if (positions) {
        body.position += lin;
        body.orientation = IntegrateOrientation(body.orientation, ang, 1.0);
      } else {
        body.linear_velocity += lin;
        body.angular_velocity += ang;
      }
    }
  };

  std::vector<InverseMass> inv(nb);
  for (int it = 0; it < iterations; ++it) {
    for (int b = 0; b < nb; ++b) inv[b] = Invert(bodies[b]);
    const Eigen::MatrixXd jac = JointJacobian(bodies, joints);
    const Eigen::MatrixXd minv_jt = InverseMassTimes(inv, jac);
    Eigen::VectorXd c(3 * nj);
    const std::vector<Vec3> errors = JointPositionErrors(bodies, joints);
    for (int j = 0; j < nj; ++j) c.segment<3>(3 * j) = errors[j];
    const Eigen::LLT<Eigen::MatrixXd> llt(jac * minv_jt);
    apply(-minv_jt * llt.solve(c), true);
  }

  // Remove the velocity component that violates the joints.
  for (int b = 0; b < nb; ++b) inv[b] = Invert(bodies[b]);
  const Eigen::MatrixXd jac = JointJacobian(bodies, joints);
  const Eigen::MatrixXd minv_jt = InverseMassTimes(inv, jac);
  Eigen::VectorXd v(6 * nb);
  for (int b = 0; b < nb; ++b) {
    v.segment<3>(6 * b) = bodies[b].linear_velocity;
    v.segment<3>(6 * b + 3) = bodies[b].angular_velocity;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(jac * minv_jt);
  apply(-minv_jt * llt.solve(jac * v), false);
  return max_error();
}

}  // namespace mbt::sim
