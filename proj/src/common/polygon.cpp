#include "mbt/common/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace mbt {
namespace {

double Cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double DistanceToSegment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

bool PointInPolygon(const Vec2& p, std::span<const Vec2> polygon,
                    double tolerance) {
  const std::size_t n = polygon.size();
  if (n == 0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (DistanceToSegment(p, polygon[i], polygon[(i + 1) % n]) <= tolerance) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross =
          (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

Polygon ConvexHull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  Polygon hull(2 * points.size());
  std::size_t k = 0;
  for (const Vec2& p : points) {
    while (k >= 2 && Cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, t = k + 1; i-- > 0;) {
    const Vec2& p = points[i];
    while (k >= t && Cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double SignedArea(std::span<const Vec2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

LaminaMoments ComputeLaminaMoments(std::span<const Vec2> polygon) {
  LaminaMoments m;
  const std::size_t n = polygon.size();
  double area = 0.0, cx = 0.0, cy = 0.0, ixx = 0.0, iyy = 0.0, ixy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = polygon[i].x(), y0 = polygon[i].y();
    const double x1 = polygon[(i + 1) % n].x(), y1 = polygon[(i + 1) % n].y();
    const double c = x0 * y1 - x1 * y0;
    area += c;
    cx += (x0 + x1) * c;
    cy += (y0 + y1) * c;
    ixx += (y0 * y0 + y0 * y1 + y1 * y1) * c;
    iyy += (x0 * x0 + x0 * x1 + x1 * x1) * c;
    ixy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * c;
  }
  area *= 0.5;
  if (area == 0.0) return m;
  cx /= 6.0 * area;
  cy /= 6.0 * area;
  ixx /= 12.0;
  iyy /= 12.0;
  ixy /= 24.0;
  if (area < 0.0) {
    area = -area;
    ixx = -ixx;
    iyy = -iyy;
    ixy = -ixy;
  }
  m.area = area;
  m.centroid = {cx, cy};
  m.ixx = ixx - area * cy * cy;
  m.iyy = iyy - area * cx * cx;
  m.ixy = ixy - area * cx * cy;
  return m;
}

Polygon RectanglePolygon(double half_x, double half_y, const Vec2& center) {
  return {center + Vec2(-half_x, -half_y), center + Vec2(half_x, -half_y),
          center + Vec2(half_x, half_y), center + Vec2(-half_x, half_y)};
}

}  // namespace mbt
