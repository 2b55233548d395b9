#ifndef MBT_COMMON_POLYGON_HPP_
#define MBT_COMMON_POLYGON_HPP_

#include <span>
#include <vector>

#include "mbt/common/math.hpp"

namespace mbt {

using Polygon = std::vector<Vec2>;

// Boundary-inclusive containment test (within `tolerance` of an edge counts
// as inside). Works for simple polygons of either winding.
bool PointInPolygon(const Vec2& p, std::span<const Vec2> polygon,
                    double tolerance = 1e-9);

// Counter-clockwise convex hull (Andrew's monotone chain), collinear points
// dropped.
Polygon ConvexHull(std::vector<Vec2> points);

double SignedArea(std::span<const Vec2> polygon);

// Area moments of a uniform-density lamina: centroid and the second moments
// Ixx = int y^2, Iyy = int x^2, Ixy = int xy taken about the centroid.
struct LaminaMoments {
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();
  double ixx = 0.0;
  double iyy = 0.0;
  double ixy = 0.0;
};
LaminaMoments ComputeLaminaMoments(std::span<const Vec2> polygon);

Polygon RectanglePolygon(double half_x, double half_y,
                         const Vec2& center = Vec2::Zero());

}  // namespace mbt

#endif  // MBT_COMMON_POLYGON_HPP_
