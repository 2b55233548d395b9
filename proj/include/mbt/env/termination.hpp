#ifndef MBT_ENV_TERMINATION_HPP_
#define MBT_ENV_TERMINATION_HPP_

#include <string_view>

#include "mbt/sim/system.hpp"

namespace mbt::env {

enum class TerminationReason {
  kNone,
  kCarrierTilt,
  kPelvisTilt,
  kKneeGround,  // the carrier outline touches the ground
  kRelativeYaw,
  kPelvisHeight,
  kTimeout,
};

std::string_view TerminationName(TerminationReason reason);

struct TerminationLimits {
  double max_tilt = 0.5235987755982988;          // 30 deg
  double max_relative_yaw = 0.5235987755982988;  // 30 deg
  double min_height = 0.5;
  double max_height = 1.0;
  int horizon = 500;
};

// The first violated condition in the order of TerminationReason. Bounds are
// inclusive: a value exactly on a limit does not terminate. `step` counts
// completed policy steps.
TerminationReason CheckTermination(const sim::SimState& state, long step,
                                   const TerminationLimits& limits = {});

inline bool IsFailure(TerminationReason r) {
  return r != TerminationReason::kNone && r != TerminationReason::kTimeout;
}

}  // namespace mbt::env

#endif  // MBT_ENV_TERMINATION_HPP_
