#include "mbt/env/termination.hpp"

#include <cmath>

#include "mbt/env/observation.hpp"

namespace mbt::env {
namespace {

bool Tilted(const Quat& q, double limit) {
  const Vec3 rpy = RollPitchYaw(q);
  return std::abs(rpy[0]) > limit || std::abs(rpy[1]) > limit;
}

}  // namespace

std::string_view TerminationName(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kNone: return "none";
    case TerminationReason::kCarrierTilt: return "carrier_tilt";
    case TerminationReason::kPelvisTilt: return "pelvis_tilt";
    case TerminationReason::kKneeGround: return "knee_ground";
    case TerminationReason::kRelativeYaw: return "relative_yaw";
    case TerminationReason::kPelvisHeight: return "pelvis_height";
    case TerminationReason::kTimeout: return "timeout";
  }
  return "unknown";
}

TerminationReason CheckTermination(const sim::SimState& state, long step,
                                   const TerminationLimits& limits) {
  const int n = state.NumRobots();
  if (Tilted(state.CarrierOrientation(), limits.max_tilt)) {
    return TerminationReason::kCarrierTilt;
  }
  for (int r = 0; r < n; ++r) {
    if (Tilted(state.PelvisOrientation(r), limits.max_tilt)) {
      return TerminationReason::kPelvisTilt;
    }
  }
  for (const Vec2& v : state.config.carrier_extent) {
    const Vec3 p = state.CarrierPointWorld(Vec3(v.x(), v.y(), 0.0));
    if (p.z() <= state.ground.HeightBelow(p)) return TerminationReason::kKneeGround;
  }
  for (int r = 0; r < n; ++r) {
    if (std::abs(RelativeYaw(state, r)) > limits.max_relative_yaw) {
      return TerminationReason::kRelativeYaw;
    }
  }
  for (int r = 0; r < n; ++r) {
    const double h = state.PelvisHeight(r);
    if (!(h >= limits.min_height && h <= limits.max_height)) {
      return TerminationReason::kPelvisHeight;
    }
  }
  if (step >= limits.horizon) return TerminationReason::kTimeout;
  return TerminationReason::kNone;
}

}  // namespace mbt::env
