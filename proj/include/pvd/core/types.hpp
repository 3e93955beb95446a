#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <string>

#include "pvd/core/errors.hpp"

namespace pvd {

using Point3 = Eigen::Vector3d;
using ImagePoint = Eigen::Vector2d;

enum class Category { MC, LPC, IPCCandidate, IPC };
enum class BoxState { Candidate, ConfirmedIPC };

const char* to_string(Category c);
const char* to_string(BoxState s);
Category category_from_string(const std::string& s);
BoxState box_state_from_string(const std::string& s);

struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  // Throws DomainError on violated invariants.
  void validate() const;
};

// Rigid transform, stored world -> camera: x_cam = R * x_world + t.
struct Pose {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};

  static Pose identity() { return Pose{}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rotation * x + translation; }

  // this ∘ other: apply `other` first.
  Pose composed(const Pose& other) const {
    Pose out;
    out.rotation = (rotation * other.rotation).normalized();
    out.translation = rotation * other.translation + translation;
    return out;
  }

  Pose inverse() const {
    Pose out;
    out.rotation = rotation.conjugate();
    out.translation = -(out.rotation * translation);
    return out;
  }

  // Camera center in world coordinates.
  Eigen::Vector3d center() const { return rotation.conjugate() * (-translation); }
};

struct BoundingBox2D {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  Category category = Category::IPCCandidate;
  double score = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(const ImagePoint& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  void validate() const;
};

struct BoundingBox3D {
  Point3 center{0, 0, 0};
  Eigen::Vector3d extents{1, 1, 1};  // full side lengths, meters
  double yaw = 0.0;
  Category category = Category::IPCCandidate;
  BoxState state = BoxState::Candidate;
  int id = -1;
};

}  // namespace pvd
