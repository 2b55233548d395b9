#ifndef MBT_ENV_CONFIGURATION_HPP_
#define MBT_ENV_CONFIGURATION_HPP_

#include "mbt/common/random.hpp"
#include "mbt/env/curriculum.hpp"
#include "mbt/sim/randomization.hpp"
#include "mbt/sim/scene.hpp"

namespace mbt::env {

struct ConfigurationRanges {
  double single_plate_half = 0.3;   // N=1 carrier half-size, m
  sim::Range bar_length{1.0, 3.0};  // N=2
  double control_radius = 1.0;      // N=2, control point within this of a robot
  double triangle_radius = 2.0;     // N=3, vertices drawn in this disc
  double min_robot_spacing = 1.0;   // N=3 minimum side length
  double min_triangle_height = 0.5; // N=3 minimum altitude
  double extent_margin = 0.2;       // carrier outline beyond the robots
};

sim::Range BarMassRange(int num_robots);

// Samples a training configuration for `num_robots` (1..3). The bar mass is
// uniform in its range when `random_bar_mass`, else the range midpoint.
sim::AttachmentConfig SampleConfiguration(int num_robots, bool random_bar_mass,
                                          Rng& rng,
                                          const ConfigurationRanges& ranges = {});

// Draws N uniformly from the stage's allowed counts, then samples as above.
sim::AttachmentConfig SampleConfiguration(const CurriculumStage& stage, Rng& rng,
                                          const ConfigurationRanges& ranges = {});

// Convex hull of the points pushed outward by `margin` in eight directions.
Polygon InflatedHull(const std::vector<Vec2>& points, double margin);

}  // namespace mbt::env

#endif  // MBT_ENV_CONFIGURATION_HPP_
