#include "mbt/env/configuration.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"

namespace mbt::env {
namespace {

Vec2 Rotate(const Vec2& p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Vec2(c * p.x() - s * p.y(), s * p.x() + c * p.y());
}

Vec2 UniformInDisc(Rng& rng, double radius) {
  const double r = radius * std::sqrt(UniformReal(rng, 0.0, 1.0));
  const double a = UniformReal(rng, -kPi, kPi);
  return Vec2(r * std::cos(a), r * std::sin(a));
}

// Express robot points relative to `control`, in a randomly rotated carrier
// frame, and wrap them into a config. Returns false if any R is too large.
bool Assemble(const std::vector<Vec2>& robots, const Vec2& control, double frame_angle,
              double margin, sim::AttachmentConfig& out) {
  std::vector<Vec2> local;
  for (const Vec2& p : robots) {
    const Vec2 q = Rotate(p - control, -frame_angle);
    if (q.norm() > sim::kMaxAttachmentRadius) return false;
    local.push_back(q);
  }
  out.attachments.clear();
  for (const Vec2& q : local) out.attachments.push_back(sim::Attachment::FromPoint(q));
  std::vector<Vec2> outline = local;
  outline.push_back(Vec2::Zero());
  out.carrier_extent = InflatedHull(outline, margin);
  return true;
}

}  // namespace

Polygon InflatedHull(const std::vector<Vec2>& points, double margin) {
  std::vector<Vec2> cloud;
  for (const Vec2& p : points) {
    for (int k = 0; k < 8; ++k) {
      const double a = k * kPi / 4.0;
      cloud.push_back(p + margin * Vec2(std::cos(a), std::sin(a)));
    }
  }
  return ConvexHull(cloud);
}

sim::Range BarMassRange(int num_robots) {
  switch (num_robots) {
    case 1: return {0.0, 10.0};
    case 2: return {0.0, 20.0};
    case 3: return {0.0, 15.0};
    default:
      throw ConfigError("training configurations have 1 to 3 robots");
  }
}

sim::AttachmentConfig SampleConfiguration(int n, bool random_bar_mass, Rng& rng,
                                          const ConfigurationRanges& ranges) {
  const sim::Range mass = BarMassRange(n);
  sim::AttachmentConfig config;
  config.bar_mass = random_bar_mass ? UniformReal(rng, mass.lo, mass.hi)
                                    : 0.5 * (mass.lo + mass.hi);
  if (n == 1) {
    config.attachments = {{0.0, 0.0}};
    config.carrier_extent = RectanglePolygon(ranges.single_plate_half,
                                             ranges.single_plate_half);
    return config;
  }
  for (;;) {
    const double frame_angle = UniformReal(rng, -kPi, kPi);
    if (n == 2) {
      const double length = UniformReal(rng, ranges.bar_length.lo, ranges.bar_length.hi);
      const std::vector<Vec2> robots{Vec2(-0.5 * length, 0.0), Vec2(0.5 * length, 0.0)};
      const Vec2 control =
          robots[UniformInt(rng, 0, 1)] + UniformInDisc(rng, ranges.control_radius);
      config.bars = {{0, 1}};
      if (Assemble(robots, control, frame_angle, ranges.extent_margin, config)) break;
    } else {
      std::vector<Vec2> v;
      for (int k = 0; k < 3; ++k) v.push_back(UniformInDisc(rng, ranges.triangle_radius));
      double min_side = 1e9;
      double max_side = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double side = (v[k] - v[(k + 1) % 3]).norm();
        min_side = std::min(min_side, side);
        max_side = std::max(max_side, side);
      }
      const double area = std::abs(SignedArea(v));
      if (min_side < ranges.min_robot_spacing ||
          2.0 * area / max_side < ranges.min_triangle_height) {
        continue;
      }
      // Uniform point in the triangle.
      double s = UniformReal(rng, 0.0, 1.0);
      double t = UniformReal(rng, 0.0, 1.0);
      if (s + t > 1.0) {
        s = 1.0 - s;
        t = 1.0 - t;
      }
      const Vec2 control = v[0] + s * (v[1] - v[0]) + t * (v[2] - v[0]);
      config.bars = {{0, 1}, {1, 2}, {2, 0}};
      if (Assemble(v, control, frame_angle, ranges.extent_margin, config)) break;
    }
  }
  return config;
}

sim::AttachmentConfig SampleConfiguration(const CurriculumStage& stage, Rng& rng,
                                          const ConfigurationRanges& ranges) {
  if (stage.robot_counts.empty()) throw ConfigError("stage allows no robot count");
  const int pick = UniformInt(rng, 0, static_cast<int>(stage.robot_counts.size()) - 1);
  return SampleConfiguration(stage.robot_counts[pick], stage.randomize_bar_mass, rng,
                             ranges);
}

}  // namespace mbt::env
