#include "mbt/env/command.hpp"

#include <algorithm>
#include <cmath>

namespace mbt::env {
namespace {

double ClampOr(double v, const sim::Range& r, double fallback) {
  if (std::isnan(v)) return fallback;
  return std::clamp(v, r.lo, r.hi);
}

}  // namespace

bool CommandRanges::Contains(const Command& c) const {
  return vx.Contains(c.vx) && vy.Contains(c.vy) && omega.Contains(c.omega) &&
         h.Contains(c.h) && c.duration >= min_duration && c.duration <= max_duration;
}

Command SampleCommand(Rng& rng, const CommandRanges& ranges) {
  Command c;
  const bool hold = Bernoulli(rng, ranges.hold_probability);
  const double vx = UniformReal(rng, ranges.vx.lo, ranges.vx.hi);
  const double vy = UniformReal(rng, ranges.vy.lo, ranges.vy.hi);
  const double omega = UniformReal(rng, ranges.omega.lo, ranges.omega.hi);
  c.h = UniformReal(rng, ranges.h.lo, ranges.h.hi);
  c.duration = UniformInt(rng, ranges.min_duration, ranges.max_duration);
  if (!hold) {
    c.vx = vx;
    c.vy = vy;
    c.omega = omega;
  }
  return c;
}

Command ClampCommand(const Command& c, const CommandRanges& ranges) {
  Command out = c;
  out.vx = ClampOr(c.vx, ranges.vx, 0.0);
  out.vy = ClampOr(c.vy, ranges.vy, 0.0);
  out.omega = ClampOr(c.omega, ranges.omega, 0.0);
  out.h = ClampOr(c.h, ranges.h, ranges.h.lo);
  out.duration = std::clamp(c.duration, ranges.min_duration, ranges.max_duration);
  return out;
}

}  // namespace mbt::env
