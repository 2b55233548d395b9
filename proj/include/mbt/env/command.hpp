#ifndef MBT_ENV_COMMAND_HPP_
#define MBT_ENV_COMMAND_HPP_

#include "mbt/common/random.hpp"
#include "mbt/sim/randomization.hpp"

namespace mbt::env {

// Carrier command broadcast to every robot.
struct Command {
  double vx = 0.0;     // m/s, carrier heading frame
  double vy = 0.0;     // m/s
  double omega = 0.0;  // rad/s, yaw rate
  double h = 0.8;      // m
  int duration = 100;  // policy steps

  bool IsHoldStill() const { return vx == 0.0 && vy == 0.0 && omega == 0.0; }
};

struct CommandRanges {
  sim::Range vx{-0.5, 2.0};
  sim::Range vy{-0.3, 0.3};
  sim::Range omega{-0.39269908169872414, 0.39269908169872414};  // pi/8
  sim::Range h{0.5, 0.8};
  int min_duration = 100;
  int max_duration = 450;
  double hold_probability = 0.25;

  bool Contains(const Command& c) const;
};

Command SampleCommand(Rng& rng, const CommandRanges& ranges = {});

// Clamps every field into range; NaN fields fall back to the hold-still value
// (or the lowest height).
Command ClampCommand(const Command& c, const CommandRanges& ranges = {});

}  // namespace mbt::env

#endif  // MBT_ENV_COMMAND_HPP_
