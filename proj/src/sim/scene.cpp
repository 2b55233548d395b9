#include "mbt/sim/scene.hpp"

#include <cmath>
#include <sstream>

#include "mbt/common/errors.hpp"

namespace mbt::sim {

Vec2 Attachment::Point() const {
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

Attachment Attachment::FromPoint(const Vec2& p) {
  Attachment a;
  a.radius = p.norm();
  a.angle = a.radius > 0.0 ? std::atan2(p.y(), p.x()) : 0.0;
  return a;
}

std::vector<Vec2> AttachmentConfig::Points() const {
  std::vector<Vec2> points;
  points.reserve(attachments.size());
  for (const Attachment& a : attachments) points.push_back(a.Point());
  return points;
}

void AttachmentConfig::Validate() const {
  const int n = NumRobots();
  if (n < 1) throw ConfigError("attachment configuration has no robots");
  if (!(bar_mass >= 0.0)) throw ConfigError("bar mass must be non-negative");
  if (carrier_extent.size() < 3) {
    throw ConfigError("carrier extent must be a polygon with >= 3 vertices");
  }
  if (!PointInPolygon(Vec2::Zero(), carrier_extent, 1e-9)) {
    throw ConfigError("carrier control point lies outside the carrier extent");
  }
  const std::vector<Vec2> points = Points();
  for (int i = 0; i < n; ++i) {
    const Attachment& a = attachments[i];
    if (!(a.radius >= 0.0 && a.radius <= kMaxAttachmentRadius)) {
      std::ostringstream msg;
      msg << "attachment " << i << " radius " << a.radius
          << " outside [0, " << kMaxAttachmentRadius << "] m";
      throw ConfigError(msg.str());
    }
    if (!(a.angle >= -kPi && a.angle <= kPi)) {
      throw ConfigError("attachment " + std::to_string(i) +
                        " angle outside [-pi, pi]");
    }
    if (!PointInPolygon(points[i], carrier_extent, 1e-9)) {
      throw ConfigError("attachment " + std::to_string(i) +
                        " lies outside the carrier extent");
    }
    for (int k = 0; k < i; ++k) {
      if ((points[i] - points[k]).norm() < kMinAttachmentSeparation) {
        throw ConfigError("attachments " + std::to_string(k) + " and " +
                          std::to_string(i) + " coincide");
      }
    }
  }
  for (const auto& [a, b] : bars) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw ConfigError("bar references invalid attachment indices");
    }
  }
}

double PayloadSpec::TotalMass() const {
  double total = 0.0;
  for (const FixedPayload& p : fixed) total += p.mass;
  if (dynamic) total += dynamic->mass;
  return total;
}

void PayloadSpec::Validate() const {
  for (const FixedPayload& p : fixed) {
    if (!(p.mass >= 0.0)) throw ConfigError("payload mass must be >= 0");
  }
  if (dynamic) {
    if (!(dynamic->mass >= 0.0)) throw ConfigError("payload mass must be >= 0");
    if (!(dynamic->wall_max.array() > dynamic->wall_min.array()).all()) {
      throw ConfigError("dynamic payload wall box is empty");
    }
  }
}

}  // namespace mbt::sim
