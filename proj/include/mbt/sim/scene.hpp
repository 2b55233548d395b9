#ifndef MBT_SIM_SCENE_HPP_
#define MBT_SIM_SCENE_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "mbt/common/math.hpp"
#include "mbt/common/polygon.hpp"

namespace mbt::sim {

inline constexpr double kMaxAttachmentRadius = 3.5;
inline constexpr double kMinAttachmentSeparation = 0.05;

// Attachment point of one robot, polar coordinates about the carrier control
// point in the carrier frame. A zero radius reports a zero angle.
struct Attachment {
  double radius = 0.0;
  double angle = 0.0;

  Vec2 Point() const;
  static Attachment FromPoint(const Vec2& p);
};

// Where the robots are attached and how the carrier structure mass is laid
// out. With `bars` empty the structure mass is a uniform plate over
// `carrier_extent`; otherwise it is split across the listed bars by length.
struct AttachmentConfig {
  std::vector<Attachment> attachments;
  double bar_mass = 0.0;
  Polygon carrier_extent;
  std::vector<std::pair<int, int>> bars;

  int NumRobots() const { return static_cast<int>(attachments.size()); }
  std::vector<Vec2> Points() const;

  // Throws ConfigError when any invariant is violated.
  void Validate() const;
};

struct FixedPayload {
  double mass = 0.0;
  Vec2 position = Vec2::Zero();
  Vec3 half_extents = Vec3(0.2, 0.2, 0.1);
};

// Point mass sliding on the carrier top inside a rectangular wall.
struct DynamicPayload {
  double mass = 0.0;
  Vec2 initial_position = Vec2::Zero();
  Vec2 wall_min = Vec2(-0.5, -0.5);
  Vec2 wall_max = Vec2(0.5, 0.5);
  double friction = 0.2;
  double restitution = 0.3;
};

struct PayloadSpec {
  std::vector<FixedPayload> fixed;
  std::optional<DynamicPayload> dynamic;

  double TotalMass() const;
  void Validate() const;
};

}  // namespace mbt::sim

#endif  // MBT_SIM_SCENE_HPP_
