#ifndef MBT_EVAL_METRICS_HPP_
#define MBT_EVAL_METRICS_HPP_

#include <array>
#include <span>
#include <vector>

#include "mbt/common/math.hpp"
#include "mbt/env/command.hpp"

namespace mbt::eval {

// Planar carrier pose at the control point. Yaw is unwrapped (continuous
// across +-pi) so a long turn keeps its full angle.
struct PlanarPose {
  double t = 0.0;
  Vec2 position = Vec2::Zero();
  double yaw = 0.0;
};

struct Trajectory {
  std::vector<PlanarPose> poses;   // poses[0] is the start of the episode
  std::vector<double> power;       // per policy step, all robots combined
  bool perturbed = false;

  double Duration() const;
  // Appends a pose, unwrapping `wrapped_yaw` against the previous sample.
  void Append(double t, const Vec2& position, double wrapped_yaw);
};

// Pose the command asks for after `elapsed` seconds from `start`: body-frame
// velocities (vx, vy) turning at omega.
PlanarPose ExpectedPose(const PlanarPose& start, const env::Command& command,
                        double elapsed);

inline constexpr double kMinDriftDuration = 1.0;  // s

enum class DriftExclusion { kNone, kPerturbed, kTooShort, kEmpty };

struct Drift {
  double dx = 0.0;  // m, along the commanded heading; negative = behind
  double dy = 0.0;  // m, to the commanded left
  double dtheta = 0.0;  // rad, negative = turned less than commanded
  DriftExclusion excluded = DriftExclusion::kNone;

  bool valid() const { return excluded == DriftExclusion::kNone; }
};

// Final pose minus the command-integrated pose, expressed in the frame of the
// expected final heading. Perturbed trajectories and those shorter than 1 s
// come back flagged instead.
Drift ComputeDrift(const Trajectory& trajectory, const env::Command& command);

// 100 * early / total. Throws ConfigError when total < 1.
double FailureRate(int early, int total);
double FailureRate(const std::vector<bool>& early);

// Mean over steps of the per-step power (sim::StancePower summed over robots
// and averaged over the substeps of each step).
double MeanPower(const Trajectory& trajectory);

inline constexpr const char* kPowerDefinition =
    "mean over policy steps of sum over robots and stance feet of |GRF . pelvis "
    "velocity| (W, mechanical work-rate proxy)";

}  // namespace mbt::eval

#endif  // MBT_EVAL_METRICS_HPP_
