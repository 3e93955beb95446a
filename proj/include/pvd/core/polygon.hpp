#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pvd {

using Polygon2 = std::vector<Eigen::Vector2d>;  // convex, CCW

// Signed area (positive for CCW).
double polygon_area(const Polygon2& poly);

// Sutherland-Hodgman clip of a convex subject against a convex CCW clip polygon.
Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip);

// Corners of an oriented rectangle, CCW.
Polygon2 oriented_rect(const Eigen::Vector2d& center, const Eigen::Vector2d& half_extents, double yaw);

// Fraction of `subject`'s area covered by the union of disjoint convex polygons.
double overlap_fraction(const Polygon2& subject, const std::vector<Polygon2>& regions);

bool point_in_convex(const Polygon2& poly, const Eigen::Vector2d& p);

}  // namespace pvd
