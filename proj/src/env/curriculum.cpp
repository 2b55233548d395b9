#include "mbt/env/curriculum.hpp"

#include <string>

#include "mbt/common/errors.hpp"

namespace mbt::env {

CurriculumStage MakeStage(int stage, double perturbation_bound,
                          double torsion_bound) {
  CurriculumStage s;
  s.stage = stage;
  switch (stage) {
    case 1:
      break;
    case 2:
      s.perturbation_bound = perturbation_bound;
      s.torsion_bound = torsion_bound;
      break;
    case 3:
      s.robot_counts = {1, 2, 3};
      break;
    case 4:
      s.robot_counts = {1, 2, 3};
      s.perturbation_bound = perturbation_bound;
      s.torsion_bound = torsion_bound;
      s.perturb_robots = true;
      s.randomize_bar_mass = true;
      break;
    default:
      throw ConfigError("curriculum stage must be 1..4, got " + std::to_string(stage));
  }
  return s;
}

}  // namespace mbt::env
