#ifndef MBT_EVAL_SCENARIO_HPP_
#define MBT_EVAL_SCENARIO_HPP_

#include <array>
#include <string>
#include <vector>

#include "mbt/common/random.hpp"
#include "mbt/env/command.hpp"
#include "mbt/sim/scene.hpp"

namespace mbt::eval {

inline constexpr int kEvalHorizon = 1000;  // 20 s at 50 Hz
inline constexpr double kEvalHeight = 0.75;

struct NamedCommand {
  std::string name;
  env::Command command;
};

// hold-still, forward 1 m/s, sideways 0.25 m/s, turn 15 deg/s. The duration
// covers the whole horizon.
const std::array<NamedCommand, 4>& StandardCommands();
// Throws ConfigError for an unknown name.
const NamedCommand& FindCommand(const std::string& name);

// Carrier, robots and payload of one evaluation setup. The dynamic payload's
// start position is drawn per episode inside `ball_start_half`.
struct Scenario {
  std::string name;
  sim::AttachmentConfig config;
  sim::PayloadSpec payload;
  Vec2 ball_start_half = Vec2::Zero();

  sim::PayloadSpec PayloadFor(Rng& rng) const;
};

inline constexpr double kRectHalfX = 1.5;
inline constexpr double kRectHalfY = 0.75;
inline constexpr double kRectInset = 0.15;  // robots sit this far inside the edge
inline constexpr double kRectPlateMass = 10.0;
inline constexpr double kDefaultPayload = 20.0;

// Robot positions on the rectangular carrier, control point at its centre.
// Two robots sit in line on the long axis and three form a triangle (two
// corners and the opposite short-edge midpoint). From four on: the corners,
// then evenly spaced pairs on the long edges, plus the centre when the count
// is odd.
std::vector<Vec2> RectLayout(int num_robots);

// Names: rect-N (N = 2..10), 1-R*, sacks, log, dynamic, rectangle, l-shape,
// t-shape, triangle, inline-2. `payload_kg` < 0 keeps the scenario default;
// otherwise the fixed payloads are replaced by one centred block of that
// mass. Throws ConfigError for an unknown name.
Scenario MakeScenario(const std::string& name, double payload_kg = -1.0);

std::vector<std::string> ScenarioNames();

}  // namespace mbt::eval

#endif  // MBT_EVAL_SCENARIO_HPP_
