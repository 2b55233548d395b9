#ifndef MBT_SIM_PERTURBATION_HPP_
#define MBT_SIM_PERTURBATION_HPP_

#include "mbt/common/math.hpp"

namespace mbt::sim {

// External push. `target` is kCarrier or a robot index; the force acts at the
// target's centre of mass and torque_z is a yaw moment on the same body.
struct PerturbationSpec {
  static constexpr int kCarrier = -1;

  Vec3 force = Vec3::Zero();
  double torque_z = 0.0;
  int target = kCarrier;
  int start_step = 0;
  int duration_steps = 50;

  bool ActiveAt(long step) const {
    return step >= start_step && step < start_step + duration_steps;
  }
  int EndStep() const { return start_step + duration_steps; }
};

}  // namespace mbt::sim

#endif  // MBT_SIM_PERTURBATION_HPP_
