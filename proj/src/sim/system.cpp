#include "mbt/sim/system.hpp"

#include <cmath>
#include <sstream>

#include "mbt/common/errors.hpp"

namespace mbt::sim {
namespace {

// Mass, first moment and inertia about the control-point origin.
struct MassAccumulator {
  double mass = 0.0;
  Vec3 first_moment = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();

  void AddBody(double m, const Vec3& com, const Mat3& inertia_about_com) {
    if (m <= 0.0) return;
    mass += m;
    first_moment += m * com;
    inertia += inertia_about_com +
               m * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
  }
  void AddPoint(double m, const Vec3& p) { AddBody(m, p, Mat3::Zero()); }

  Vec3 Com() const { return mass > 0.0 ? Vec3(first_moment / mass) : Vec3::Zero(); }
  Mat3 InertiaAboutCom() const {
    const Vec3 c = Com();
    return inertia - mass * (c.squaredNorm() * Mat3::Identity() - c * c.transpose());
  }
};

constexpr double kBarRadius = 0.03;

Mat3 RodInertia(double m, const Vec3& a, const Vec3& b) {
  const Vec3 axis = b - a;
  const double length = axis.norm();
  const Vec3 u = length > 0.0 ? Vec3(axis / length) : Vec3::UnitX();
  const Mat3 uu = u * u.transpose();
  return m * length * length / 12.0 * (Mat3::Identity() - uu) +
         0.5 * m * kBarRadius * kBarRadius * uu;
}

Mat3 LaminaInertia(double m, const LaminaMoments& moments) {
  Mat3 inertia = Mat3::Zero();
  if (moments.area <= 0.0) return inertia;
  const double rho = m / moments.area;
  inertia(0, 0) = rho * moments.ixx;
  inertia(1, 1) = rho * moments.iyy;
  inertia(2, 2) = rho * (moments.ixx + moments.iyy);
  inertia(0, 1) = inertia(1, 0) = -rho * moments.ixy;
  return inertia;
}

Mat3 BoxInertia(double m, const Vec3& half) {
  const Vec3 sq = half.cwiseProduct(half);
  return Vec3(m / 3.0 * (sq.y() + sq.z()), m / 3.0 * (sq.x() + sq.z()),
              m / 3.0 * (sq.x() + sq.y()))
      .asDiagonal();
}

void CheckFinite(const SimState& state) {
  bool ok = true;
  for (const RigidBodyState& body : state.bodies) ok = ok && body.IsFinite();
  if (state.ball) {
    ok = ok && state.ball->local_position.allFinite() &&
         state.ball->local_velocity.allFinite();
  }
  if (!ok) {
    throw NumericalFault("simulation diverged at step " +
                         std::to_string(state.step) + "\n" + state.DebugDump());
  }
}

// Contact force of the sliding payload on the carrier for this substep.
BodyWrench BallWrench(SimState& s, const Vec3& point_accel) {
  BodyWrench wrench;
  DynamicPayloadState& ball = *s.ball;
  const RigidBodyState& carrier = s.Carrier();
  const double m = ball.spec.mass;
  const Vec3 normal = carrier.orientation * Vec3::UnitZ();
  const Vec3 gravity(0.0, 0.0, -kGravity);
  const Vec3 rel_accel = point_accel - gravity;
  const double fn = m * std::max(0.0, rel_accel.dot(normal));
  const Vec3 u_world =
      carrier.orientation * Vec3(ball.local_velocity.x(), ball.local_velocity.y(), 0.0);

  Vec3 friction = Vec3::Zero();
  const double mu = ball.spec.friction;
  if (u_world.norm() > 1e-4) {
    friction = -mu * fn * u_world.normalized();
  } else {
    Vec3 required = m * rel_accel;
    required -= required.dot(normal) * normal;
    const double req = required.norm();
    friction = req <= mu * fn ? required : Vec3(required * (mu * fn / req));
  }
  ball.carrier_force = -(fn * normal + friction) + ball.pending_impulse / s.params.SubstepDt();
  ball.pending_impulse.setZero();
  const Vec3 contact = s.CarrierPointWorld(
      Vec3(ball.local_position.x(), ball.local_position.y(), 0.0));
  wrench.AddForceAtPoint(ball.carrier_force, contact - carrier.position);

  // Relative tangential acceleration, carrier frame.
  const Vec3 ball_accel = gravity + (fn * normal + friction) / std::max(m, 1e-12);
  const Vec3 rel = carrier.orientation.inverse() * (ball_accel - point_accel);
  ball.local_velocity += Vec2(rel.x(), rel.y()) * s.params.SubstepDt();
  return wrench;
}

void AdvanceBall(SimState& s, double dt) {
  DynamicPayloadState& ball = *s.ball;
  ball.local_position += ball.local_velocity * dt;
  Vec2 impulse_local = Vec2::Zero();
  for (int k = 0; k < 2; ++k) {
    const double lo = ball.spec.wall_min[k];
    const double hi = ball.spec.wall_max[k];
    double& x = ball.local_position[k];
    double& u = ball.local_velocity[k];
    if (x < lo) {
      x = lo;
      if (u < 0.0) {
        impulse_local[k] += -ball.spec.mass * (1.0 + ball.spec.restitution) * u;
        u = -ball.spec.restitution * u;
      }
    } else if (x > hi) {
      x = hi;
      if (u > 0.0) {
        impulse_local[k] += -ball.spec.mass * (1.0 + ball.spec.restitution) * u;
        u = -ball.spec.restitution * u;
      }
    }
  }
  // The wall pushes the ball; the ball pushes the carrier back.
  ball.pending_impulse -= s.Carrier().orientation * Vec3(impulse_local.x(), impulse_local.y(), 0.0);
}

}  // namespace

double Ground::Height(double x) const { return std::tan(slope) * x; }

Vec3 Ground::Normal() const {
  return Vec3(-std::sin(slope), 0.0, std::cos(slope));
}

Quat Ground::Aligned(double yaw) const {
  return Quat(Eigen::AngleAxisd(-slope, Vec3::UnitY())) * YawRotation(yaw);
}

Vec3 SimState::CarrierPointWorld(const Vec3& local) const {
  return bodies[0].PointWorld(local - carrier_com_local);
}

Vec3 SimState::ControlPointPosition() const {
  return CarrierPointWorld(Vec3::Zero());
}

Vec3 SimState::ControlPointVelocity() const {
  return bodies[0].PointVelocity(-carrier_com_local);
}

Vec3 SimState::PelvisPosition(int r) const {
  return bodies[r + 1].PointWorld(-pelvis_com_local[r]);
}

Vec3 SimState::PelvisVelocity(int r) const {
  return bodies[r + 1].PointVelocity(-pelvis_com_local[r]);
}

double SimState::PelvisHeight(int r) const {
  const Vec3 p = PelvisPosition(r);
  return p.z() - ground.HeightBelow(p);
}

Vec3 SimState::AttachmentWorld(int r) const {
  return bodies[0].PointWorld(joints[r].carrier_anchor);
}

Vec3 SimState::HipPosition(int r, int foot) const {
  const double side = foot == kLeftFoot ? 1.0 : -1.0;
  return PelvisPosition(r) +
         PelvisOrientation(r) * Vec3(0.0, side * params.legs.hip_half_width, 0.0);
}

double SimState::TotalWeight() const {
  double mass = DynamicPayloadMass();
  for (const RigidBodyState& body : bodies) mass += body.mass;
  return mass * kGravity;
}

double SimState::SupportShareWeight() const {
  const int n = NumRobots();
  return (bodies[1].mass + (bodies[0].mass + DynamicPayloadMass()) / n) * kGravity;
}

double SimState::MaxJointResidual() const {
  double worst = 0.0;
  for (const Vec3& e : JointPositionErrors(bodies, joints)) {
    worst = std::max(worst, e.norm());
  }
  return worst;
}

double SimState::Power() const {
  double total = 0.0;
  for (double p : robot_power) total += p;
  return total;
}

std::string SimState::DebugDump() const {
  std::ostringstream out;
  out.precision(10);
  out << "step " << step << " t " << Time() << "\n";
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    const RigidBodyState& body = bodies[b];
    out << (b == 0 ? "carrier" : "pelvis" + std::to_string(b - 1))
        << " pos " << body.position.transpose() << " quat "
        << body.orientation.coeffs().transpose() << " vel "
        << body.linear_velocity.transpose() << " omega "
        << body.angular_velocity.transpose() << "\n";
  }
  for (std::size_t r = 0; r < legs.size(); ++r) {
    for (int f = 0; f < 2; ++f) {
      const FootState& foot = legs[r].feet[f];
      out << "robot" << r << (f == 0 ? " left" : " right") << " foot "
          << foot.position.transpose() << " stance " << foot.in_stance
          << " grf " << foot.commanded_grf.transpose() << "\n";
    }
  }
  return out.str();
}

SimState BuildSystem(const AttachmentConfig& config, const PayloadSpec& payload,
                     const RandomizedDynamics& dynamics, const SimParams& params,
                     double initial_height, double initial_yaw) {
  config.Validate();
  payload.Validate();
  if (!(dynamics.mass_multiplier > 0.0)) {
    throw ConfigError("mass multiplier must be positive");
  }
  const int n = config.NumRobots();
  const double mm = dynamics.mass_multiplier;

  SimState s;
  s.params = params;
  s.config = config;
  s.payload = payload;
  s.dynamics = dynamics;
  s.ground.slope = dynamics.ground_slope;

  // Carrier mass properties in the control-point frame.
  MassAccumulator carrier_mass;
  const std::vector<Vec2> points = config.Points();
  for (const Vec2& p : points) {
    carrier_mass.AddPoint(params.mount_mass * mm, Vec3(p.x(), p.y(), 0.0));
  }
  const double structure = config.bar_mass * mm;
  if (config.bars.empty()) {
    const LaminaMoments moments = ComputeLaminaMoments(config.carrier_extent);
    carrier_mass.AddBody(structure,
                         Vec3(moments.centroid.x(), moments.centroid.y(), 0.0),
                         LaminaInertia(structure, moments));
  } else {
    double total_length = 0.0;
    for (const auto& [a, b] : config.bars) total_length += (points[a] - points[b]).norm();
    for (const auto& [a, b] : config.bars) {
      const Vec3 pa(points[a].x(), points[a].y(), 0.0);
      const Vec3 pb(points[b].x(), points[b].y(), 0.0);
      const double m = structure * (pa - pb).norm() / total_length;
      carrier_mass.AddBody(m, 0.5 * (pa + pb), RodInertia(m, pa, pb));
    }
  }
  for (const FixedPayload& p : payload.fixed) {
    carrier_mass.AddBody(p.mass, Vec3(p.position.x(), p.position.y(), 0.0),
                         BoxInertia(p.mass, p.half_extents));
  }
  s.carrier_com_local = carrier_mass.Com();

  const Quat carrier_q = s.ground.Aligned(initial_yaw);
  const Vec3 origin(0.0, 0.0, initial_height + s.ground.Height(0.0));
  RigidBodyState carrier;
  carrier.mass = carrier_mass.mass;
  carrier.inertia = carrier_mass.InertiaAboutCom() +
                    params.carrier_min_inertia * Mat3::Identity();
  carrier.orientation = carrier_q;
  carrier.position = origin + carrier_q * s.carrier_com_local;
  s.bodies.push_back(carrier);

  const Quat pelvis_q = YawRotation(initial_yaw);
  for (int r = 0; r < n; ++r) {
    const Vec3 local(points[r].x(), points[r].y(), 0.0);
    const Vec3 anchor = origin + carrier_q * local;
    const Vec3 com_local(dynamics.com_offset_fraction * params.com_reference_length,
                         0.0, 0.0);
    RigidBodyState pelvis;
    pelvis.mass = params.pelvis_mass * mm;
    pelvis.inertia = (params.pelvis_inertia * mm).asDiagonal();
    pelvis.orientation = pelvis_q;
    pelvis.position = anchor + pelvis_q * com_local;
    s.bodies.push_back(pelvis);
    s.pelvis_com_local.push_back(com_local);

    BallJoint joint;
    joint.robot = r;
    joint.carrier_anchor = local - s.carrier_com_local;
    joint.pelvis_anchor = -com_local;
    s.joints.push_back(joint);
  }

  s.legs.resize(n);
  for (int r = 0; r < n; ++r) {
    LegState& legs = s.legs[r];
    legs.height_setpoint = initial_height;
    for (int f = 0; f < 2; ++f) {
      Vec3 foot = s.HipPosition(r, f);
      foot.z() = s.ground.HeightBelow(foot);
      legs.feet[f].position = foot;
      legs.feet[f].liftoff_position = foot;
      legs.feet[f].in_stance = true;
      legs.feet[f].phase = 0.5 * f;
    }
  }
  if (payload.dynamic) {
    DynamicPayloadState ball;
    ball.spec = *payload.dynamic;
    ball.local_position = payload.dynamic->initial_position;
    s.ball = ball;
  }
  s.gait.height = initial_height;
  s.joint_force.assign(n, Vec3::Zero());
  s.grf.assign(n, {Vec3::Zero(), Vec3::Zero()});
  s.base_acceleration.assign(n, Vec3::Zero());
  s.robot_power.assign(n, 0.0);
  return s;
}

double StancePower(const std::array<Vec3, 2>& grf, const std::array<bool, 2>& stance,
                   const Vec3& pelvis_velocity) {
  double p = 0.0;
  for (int f = 0; f < 2; ++f) {
    if (stance[f]) p += std::abs(grf[f].dot(pelvis_velocity));
  }
  return p;
}

void SimStep(SimState& state, std::span<const ActionCommand> actions,
             std::span<const PerturbationSpec> perturbations) {
  const int n = state.NumRobots();
  if (static_cast<int>(actions.size()) != n) {
    throw ShapeError("SimStep: expected one action per robot");
  }
  const double dt = state.params.SubstepDt();
  const int nb = static_cast<int>(state.bodies.size());
  const BaumgarteGains gains = BaumgarteGains::ForTimestep(dt);
  const double joint_damping =
      state.params.joint_damping * state.dynamics.damping_multiplier;

  std::vector<Vec3> previous_velocity(n);
  for (int r = 0; r < n; ++r) {
    previous_velocity[r] = state.Pelvis(r).linear_velocity;
    for (FootState& foot : state.legs[r].feet) foot.touchdown = false;
  }
  std::vector<double> power(n, 0.0);
  std::vector<BodyWrench> wrenches(nb);
  Vec3 ball_point_accel(0.0, 0.0, 0.0);

  for (int sub = 0; sub < state.params.substeps; ++sub) {
    for (int b = 0; b < nb; ++b) {
      wrenches[b] = BodyWrench{};
      wrenches[b].force = Vec3(0.0, 0.0, -state.bodies[b].mass * kGravity);
    }
    for (const PerturbationSpec& p : perturbations) {
      if (!p.ActiveAt(state.step)) continue;
      const int b = p.target == PerturbationSpec::kCarrier ? 0 : p.target + 1;
      if (b < 0 || b >= nb) throw ConfigError("perturbation targets a missing body");
      wrenches[b].force += p.force;
      wrenches[b].torque.z() += p.torque_z;
    }
    for (int r = 0; r < n; ++r) {
      const LegStepResult legs = StepLegs(state, r, actions[r], dt);
      const RigidBodyState& pelvis = state.Pelvis(r);
      const Vec3 v = state.PelvisVelocity(r);
      std::array<bool, 2> stance{};
      for (int f = 0; f < 2; ++f) {
        stance[f] = legs.legs.feet[f].in_stance;
        if (!stance[f]) continue;
        wrenches[r + 1].AddForceAtPoint(legs.grf[f],
                                        legs.legs.feet[f].position - pelvis.position);
      }
      power[r] += StancePower(legs.grf, stance, v);
      wrenches[r + 1].torque += legs.stabilizing_torque;
      state.grf[r] = legs.grf;

      const Vec3 relative =
          pelvis.angular_velocity - state.Carrier().angular_velocity;
      wrenches[r + 1].torque -= joint_damping * relative;
      wrenches[0].torque += joint_damping * relative;
    }
    if (state.ball) {
      const BodyWrench ball = BallWrench(state, ball_point_accel);
      wrenches[0].force += ball.force;
      wrenches[0].torque += ball.torque;
    }

    const ConstrainedDynamics dyn =
        SolveConstrainedDynamics(state.bodies, state.joints, wrenches, gains);
    state.solver_residual = dyn.residual;
    for (int r = 0; r < n; ++r) state.joint_force[r] = dyn.joint_force_carrier[r];

    if (state.ball) {
      const RigidBodyState& c = state.Carrier();
      const Vec3 lever =
          state.CarrierPointWorld(Vec3(state.ball->local_position.x(),
                                       state.ball->local_position.y(), 0.0)) -
          c.position;
      ball_point_accel = dyn.linear_acceleration[0] +
                         dyn.angular_acceleration[0].cross(lever) +
                         c.angular_velocity.cross(c.angular_velocity.cross(lever));
    }

    for (int b = 0; b < nb; ++b) {
      RigidBodyState& body = state.bodies[b];
      body.linear_velocity += dyn.linear_acceleration[b] * dt;
      body.angular_velocity += dyn.angular_acceleration[b] * dt;
      body.position += body.linear_velocity * dt;
      body.orientation = IntegrateOrientation(body.orientation, body.angular_velocity, dt);
    }
    ProjectToJoints(state.bodies, state.joints);
    if (state.ball) AdvanceBall(state, dt);
    CheckFinite(state);
  }

  ++state.step;
  for (int r = 0; r < n; ++r) {
    state.base_acceleration[r] =
        (state.Pelvis(r).linear_velocity - previous_velocity[r]) / state.params.policy_dt;
    state.robot_power[r] = power[r] / state.params.substeps;
  }
}

}  // namespace mbt::sim
