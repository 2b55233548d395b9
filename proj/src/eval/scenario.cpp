#include "mbt/eval/scenario.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"
#include "mbt/env/configuration.hpp"

namespace mbt::eval {
namespace {

env::Command Hold(double vx, double vy, double omega) {
  env::Command c;
  c.vx = vx;
  c.vy = vy;
  c.omega = omega;
  c.h = kEvalHeight;
  c.duration = kEvalHorizon;
  return c;
}

sim::AttachmentConfig FromPoints(const std::vector<Vec2>& points, double bar_mass,
                                 Polygon extent) {
  sim::AttachmentConfig config;
  for (const Vec2& p : points) config.attachments.push_back(sim::Attachment::FromPoint(p));
  config.bar_mass = bar_mass;
  config.carrier_extent = std::move(extent);
  return config;
}

Polygon Circle(double radius, int sides) {
  Polygon out;
  for (int k = 0; k < sides; ++k) {
    const double a = 2.0 * kPi * k / sides;
    out.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return out;
}

sim::FixedPayload Block(double mass, Vec2 at = Vec2::Zero(),
                        Vec3 half = Vec3(0.3, 0.3, 0.15)) {
  sim::FixedPayload p;
  p.mass = mass;
  p.position = at;
  p.half_extents = half;
  return p;
}

bool ParseRect(const std::string& name, int* n) {
  if (name.rfind("rect-", 0) != 0) return false;
  try {
    std::size_t used = 0;
    *n = std::stoi(name.substr(5), &used);
    return used == name.size() - 5;
  } catch (const std::exception&) {
    return false;
  }
}

Scenario Build(const std::string& name) {
  Scenario s;
  s.name = name;
  int n = 0;
  if (ParseRect(name, &n)) {
    if (n < 2 || n > 10) throw ConfigError("rect-N needs 2 <= N <= 10, got " + name);
    s.config = FromPoints(RectLayout(n), kRectPlateMass,
                          RectanglePolygon(kRectHalfX, kRectHalfY));
    s.payload.fixed.push_back(Block(kDefaultPayload));
  } else if (name == "1-R*") {
    // The robot's own base is the control point; nothing is carried.
    s.config = FromPoints({Vec2::Zero()}, 5.0, RectanglePolygon(0.3, 0.3));
  } else if (name == "sacks") {
    s.config = FromPoints({Vec2(0.65, 0.65), Vec2(-0.65, 0.65), Vec2(-0.65, -0.65),
                           Vec2(0.65, -0.65)},
                          10.0, Circle(1.2, 24));
    Rng rng(MixSeed(0x5ac5, 5));
    for (double m : {4.0, 5.5, 7.0, 8.5, 10.0}) {  // 35 kg
      const double r = 0.7 * std::sqrt(UniformReal(rng, 0.0, 1.0));
      const double a = UniformReal(rng, -kPi, kPi);
      s.payload.fixed.push_back(
          Block(m, Vec2(r * std::cos(a), r * std::sin(a)), Vec3(0.2, 0.15, 0.1)));
    }
  } else if (name == "log") {
    s.config = FromPoints({Vec2(-1.6, 0.0), Vec2(0.0, 0.0), Vec2(1.6, 0.0)}, 10.0,
                          RectanglePolygon(2.0, 0.25));
    s.payload.fixed.push_back(Block(20.0, Vec2::Zero(), Vec3(1.5, 0.15, 0.15)));
  } else if (name == "dynamic") {
    s.config = FromPoints({Vec2(0.8, 0.8), Vec2(-0.8, 0.8), Vec2(-0.8, -0.8),
                           Vec2(0.8, -0.8)},
                          10.0, RectanglePolygon(1.0, 1.0));
    sim::DynamicPayload ball;
    ball.mass = 20.0;  // 30 kg with the container
    ball.wall_min = Vec2(-0.8, -0.8);
    ball.wall_max = Vec2(0.8, 0.8);
    s.payload.dynamic = ball;
    s.ball_start_half = Vec2(0.4, 0.4);
  } else if (name == "rectangle") {
    s.config = FromPoints({Vec2(1.0, 0.45), Vec2(-1.0, 0.45), Vec2(-1.0, -0.45),
                           Vec2(1.0, -0.45)},
                          10.0, RectanglePolygon(1.2, 0.6));
    s.payload.fixed.push_back(Block(kDefaultPayload));
  } else if (name == "l-shape") {
    s.config = FromPoints({Vec2(-0.3, -0.3), Vec2(1.3, -0.3), Vec2(-0.3, 1.3)}, 10.0,
                          {Vec2(-0.7, -0.7), Vec2(1.7, -0.7), Vec2(1.7, 0.1),
                           Vec2(0.1, 0.1), Vec2(0.1, 1.7), Vec2(-0.7, 1.7)});
    s.payload.fixed.push_back(Block(kDefaultPayload, Vec2::Zero(), Vec3(0.3, 0.3, 0.15)));
  } else if (name == "t-shape") {
    s.config = FromPoints({Vec2(-1.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, -1.5)}, 10.0,
                          {Vec2(-1.3, -0.3), Vec2(-0.3, -0.3), Vec2(-0.3, -1.8),
                           Vec2(0.3, -1.8), Vec2(0.3, -0.3), Vec2(1.3, -0.3),
                           Vec2(1.3, 0.3), Vec2(-1.3, 0.3)});
    s.payload.fixed.push_back(Block(kDefaultPayload));
  } else if (name == "triangle") {
    // Equilateral, like a training configuration: bars at the midpoint mass.
    std::vector<Vec2> pts;
    for (double deg : {90.0, 210.0, 330.0}) {
      pts.emplace_back(0.9 * std::cos(Deg2Rad(deg)), 0.9 * std::sin(Deg2Rad(deg)));
    }
    const sim::Range mass = env::BarMassRange(3);
    s.config = FromPoints(pts, 0.5 * (mass.lo + mass.hi), env::InflatedHull(pts, 0.2));
    s.config.bars = {{0, 1}, {1, 2}, {2, 0}};
  } else if (name == "inline-2") {
    const std::vector<Vec2> pts{Vec2(-1.0, 0.0), Vec2(1.0, 0.0)};
    const sim::Range mass = env::BarMassRange(2);
    s.config = FromPoints(pts, 0.5 * (mass.lo + mass.hi), env::InflatedHull(pts, 0.2));
    s.config.bars = {{0, 1}};
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  s.config.Validate();
  s.payload.Validate();
  return s;
}

}  // namespace

const std::array<NamedCommand, 4>& StandardCommands() {
  static const std::array<NamedCommand, 4> commands{{
      {"hold-still", Hold(0.0, 0.0, 0.0)},
      {"forward", Hold(1.0, 0.0, 0.0)},
      {"sideways", Hold(0.0, 0.25, 0.0)},
      {"turn", Hold(0.0, 0.0, Deg2Rad(15.0))},
  }};
  return commands;
}

const NamedCommand& FindCommand(const std::string& name) {
  for (const NamedCommand& c : StandardCommands()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown command '" + name +
                    "' (expected hold-still, forward, sideways or turn)");
}

sim::PayloadSpec Scenario::PayloadFor(Rng& rng) const {
  sim::PayloadSpec out = payload;
  if (out.dynamic) {
    out.dynamic->initial_position =
        Vec2(UniformReal(rng, -ball_start_half.x(), ball_start_half.x()),
             UniformReal(rng, -ball_start_half.y(), ball_start_half.y()));
  }
  return out;
}

std::vector<Vec2> RectLayout(int n) {
  const double x = kRectHalfX - kRectInset;
  const double y = kRectHalfY - kRectInset;
  if (n == 2) return {Vec2(x, 0.0), Vec2(-x, 0.0)};
  if (n == 3) return {Vec2(x, y), Vec2(x, -y), Vec2(-x, 0.0)};
  std::vector<Vec2> out{Vec2(x, y), Vec2(-x, y), Vec2(-x, -y), Vec2(x, -y)};
  const int per_edge = (n - 4) / 2;
  for (int k = 1; k <= per_edge; ++k) {
    const double px = -x + 2.0 * x * k / (per_edge + 1);
    out.emplace_back(px, y);
    out.emplace_back(px, -y);
  }
  if ((n - 4) % 2 == 1) out.emplace_back(0.0, 0.0);
  return out;
}

Scenario MakeScenario(const std::string& name, double payload_kg) {
  Scenario s = Build(name);
  if (payload_kg >= 0.0) {
    s.payload.fixed.clear();
    if (payload_kg > 0.0) s.payload.fixed.push_back(Block(payload_kg));
  }
  return s;
}

std::vector<std::string> ScenarioNames() {
  std::vector<std::string> out;
  for (int n = 2; n <= 10; ++n) out.push_back("rect-" + std::to_string(n));
  for (const char* s : {"1-R*", "sacks", "log", "dynamic", "rectangle", "l-shape",
                        "t-shape", "triangle", "inline-2"}) {
    out.push_back(s);
  }
  return out;
}

}  // namespace mbt::eval
