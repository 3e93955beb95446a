#include "pvd/core/polygon.hpp"

#include <cmath>

namespace pvd {

double polygon_area(const Polygon2& poly) {
  const size_t n = poly.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    acc += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * acc;
}

namespace {

// Left-of test against directed edge a->b (CCW clip keeps the left side).
inline double side(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

inline Eigen::Vector2d intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
  const Eigen::Vector2d r = b - a, s = q - p;
  const double denom = r.x() * s.y() - r.y() * s.x();
  const double t = ((p - a).x() * s.y() - (p - a).y() * s.x()) / denom;
  return a + t * r;
}

}  // namespace

Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip) {
  Polygon2 output = subject;
  const size_t nc = clip.size();
  for (size_t e = 0; e < nc && !output.empty(); ++e) {
    const Eigen::Vector2d& ca = clip[e];
    const Eigen::Vector2d& cb = clip[(e + 1) % nc];
    Polygon2 input;
    input.swap(output);
    const size_t n = input.size();
    for (size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& prev = input[(i + n - 1) % n];
      const bool cur_in = side(ca, cb, cur) >= 0.0;
      const bool prev_in = side(ca, cb, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(intersect(prev, cur, ca, cb));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(intersect(prev, cur, ca, cb));
      }
    }
  }
  return output;
}

Polygon2 oriented_rect(const Eigen::Vector2d& center, const Eigen::Vector2d& half_extents, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const Eigen::Vector2d ex{c * half_extents.x(), s * half_extents.x()};
  const Eigen::Vector2d ey{-s * half_extents.y(), c * half_extents.y()};
  return {center - ex - ey, center + ex - ey, center + ex + ey, center - ex + ey};
}

double overlap_fraction(const Polygon2& subject, const std::vector<Polygon2>& regions) {
  const double area = std::abs(polygon_area(subject));
  if (area <= 0.0) return 0.0;
  double covered = 0.0;
  for (const auto& region : regions) covered += std::abs(polygon_area(clip_convex(subject, region)));
  return std::min(1.0, covered / area);
}

bool point_in_convex(const Polygon2& poly, const Eigen::Vector2d& p) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    if (side(poly[i], poly[(i + 1) % n], p) < 0.0) return false;
  }
  return true;
}

}  // namespace pvd
