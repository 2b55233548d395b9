#ifndef MBT_SIM_RANDOMIZATION_HPP_
#define MBT_SIM_RANDOMIZATION_HPP_

#include "mbt/common/random.hpp"

namespace mbt::sim {

// Per-episode dynamics perturbation. Multipliers are relative to nominal.
// encoder_noise_std is drawn from a symmetric range; its magnitude is the
// standard deviation of the observation noise.
struct RandomizedDynamics {
  double damping_multiplier = 1.0;
  double mass_multiplier = 1.0;
  double com_offset_fraction = 0.0;
  double friction_multiplier = 1.0;
  double encoder_noise_std = 0.0;
  double ground_slope = 0.0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool Contains(double v) const { return v >= lo && v <= hi; }
};

struct RandomizationRanges {
  Range damping{0.5, 3.5};
  Range mass{0.75, 1.25};
  Range com_offset{-0.01, 0.01};
  Range friction{0.8, 1.2};
  Range encoder_noise{-0.05, 0.05};
  Range ground_slope{-0.05, 0.05};

  bool Contains(const RandomizedDynamics& d) const;
};

RandomizedDynamics RandomizeDynamics(Rng& rng,
                                     const RandomizationRanges& ranges = {});

}  // namespace mbt::sim

#endif  // MBT_SIM_RANDOMIZATION_HPP_
