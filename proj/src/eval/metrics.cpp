#include "mbt/eval/metrics.hpp"

#include <cmath>
#include <numeric>

#include "mbt/common/errors.hpp"

namespace mbt::eval {

double Trajectory::Duration() const {
  if (poses.empty()) return 0.0;
  return poses.back().t - poses.front().t;
}

void Trajectory::Append(double t, const Vec2& position, double wrapped_yaw) {
  double yaw = wrapped_yaw;
  if (!poses.empty()) {
    const double prev = poses.back().yaw;
    yaw = prev + WrapAngle(wrapped_yaw - prev);
  }
  poses.push_back({t, position, yaw});
}

PlanarPose ExpectedPose(const PlanarPose& start, const env::Command& command,
                        double elapsed) {
  const double th0 = start.yaw;
  const double w = command.omega;
  // Integrals of cos and sin of the heading over the elapsed time.
  double ic = 0.0;
  double is = 0.0;
  if (std::abs(w * elapsed) < 1e-9) {
    ic = std::cos(th0) * elapsed;
    is = std::sin(th0) * elapsed;
  } else {
    ic = (std::sin(th0 + w * elapsed) - std::sin(th0)) / w;
    is = (std::cos(th0) - std::cos(th0 + w * elapsed)) / w;
  }
  PlanarPose out;
  out.t = start.t + elapsed;
  out.position = start.position +
                 Vec2(ic * command.vx - is * command.vy, is * command.vx + ic * command.vy);
  out.yaw = th0 + w * elapsed;
  return out;
}

Drift ComputeDrift(const Trajectory& trajectory, const env::Command& command) {
  Drift d;
  if (trajectory.poses.empty()) {
    d.excluded = DriftExclusion::kEmpty;
  } else if (trajectory.perturbed) {
    d.excluded = DriftExclusion::kPerturbed;
  } else if (trajectory.Duration() < kMinDriftDuration) {
    d.excluded = DriftExclusion::kTooShort;
  }
  if (!d.valid()) return d;
  const PlanarPose& start = trajectory.poses.front();
  const PlanarPose& end = trajectory.poses.back();
  const PlanarPose expected = ExpectedPose(start, command, trajectory.Duration());
  const Vec2 err = end.position - expected.position;
  const double c = std::cos(expected.yaw);
  const double s = std::sin(expected.yaw);
  d.dx = c * err.x() + s * err.y();
  d.dy = -s * err.x() + c * err.y();
  d.dtheta = end.yaw - expected.yaw;
  return d;
}

double FailureRate(int early, int total) {
  if (total < 1) throw ConfigError("failure rate needs at least one episode");
  if (early < 0 || early > total) throw ConfigError("failure count out of range");
  return 100.0 * early / total;
}

double FailureRate(const std::vector<bool>& early) {
  int count = 0;
  for (bool e : early) count += e ? 1 : 0;
  return FailureRate(count, static_cast<int>(early.size()));
}

double MeanPower(const Trajectory& trajectory) {
  if (trajectory.power.empty()) return 0.0;
  return std::accumulate(trajectory.power.begin(), trajectory.power.end(), 0.0) /
         static_cast<double>(trajectory.power.size());
}

}  // namespace mbt::eval
