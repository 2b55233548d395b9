#ifndef MBT_ENV_CURRICULUM_HPP_
#define MBT_ENV_CURRICULUM_HPP_

#include <vector>

namespace mbt::env {

struct CurriculumStage {
  int stage = 1;
  std::vector<int> robot_counts{1};
  double perturbation_bound = 0.0;  // N, 0 disables pushes
  double torsion_bound = 0.0;       // N m yaw moment
  bool perturb_robots = false;      // pushes may also target a pelvis
  bool randomize_bar_mass = false;  // otherwise the range midpoint

  bool HasPerturbations() const {
    return perturbation_bound > 0.0 || torsion_bound > 0.0;
  }
};

inline constexpr int kNumStages = 4;

// Stage 1: one robot. Stage 2: one robot with pushes and torsion on the
// carrier. Stage 3: one to three robots, undisturbed. Stage 4: one to three
// robots, pushes on carrier and pelvises, random bar masses.
CurriculumStage MakeStage(int stage, double perturbation_bound = 50.0,
                          double torsion_bound = 5.0);

}  // namespace mbt::env

#endif  // MBT_ENV_CURRICULUM_HPP_
