#include "mbt/sim/randomization.hpp"

namespace mbt::sim {

bool RandomizationRanges::Contains(const RandomizedDynamics& d) const {
  return damping.Contains(d.damping_multiplier) &&
         mass.Contains(d.mass_multiplier) &&
         com_offset.Contains(d.com_offset_fraction) &&
         friction.Contains(d.friction_multiplier) &&
         encoder_noise.Contains(d.encoder_noise_std) &&
         ground_slope.Contains(d.ground_slope);
}

RandomizedDynamics RandomizeDynamics(Rng& rng,
                                     const RandomizationRanges& ranges) {
  RandomizedDynamics d;
  d.damping_multiplier = UniformReal(rng, ranges.damping.lo, ranges.damping.hi);
  d.mass_multiplier = UniformReal(rng, ranges.mass.lo, ranges.mass.hi);
  d.com_offset_fraction =
      UniformReal(rng, ranges.com_offset.lo, ranges.com_offset.hi);
  d.friction_multiplier =
      UniformReal(rng, ranges.friction.lo, ranges.friction.hi);
  d.encoder_noise_std =
      UniformReal(rng, ranges.encoder_noise.lo, ranges.encoder_noise.hi);
  d.ground_slope = UniformReal(rng, ranges.ground_slope.lo, ranges.ground_slope.hi);
  return d;
}

}  // namespace mbt::sim
