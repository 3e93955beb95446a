#pragma once

#include <optional>

#include "pvd/core/types.hpp"

namespace pvd {

// Pinhole projection of a camera-frame point. Throws DepthNonPositive for z <= 1e-9.
ImagePoint project(const Point3& x_cam, const CameraIntrinsics& k);

// Inverse pinhole at a known depth (camera frame).
Point3 unproject(const ImagePoint& uv, const CameraIntrinsics& k, double depth);

// x_cam = R * x_world + t.
inline Point3 transform_point(const Pose& pose, const Point3& x) { return pose.apply(x); }

// Intersection-over-union of two axis-aligned boxes; 0 when disjoint.
double iou(const BoundingBox2D& a, const BoundingBox2D& b);

// se(3) exponential; xi = (v, omega). Update convention: pose' = se3_exp(xi) ∘ pose.
Pose se3_exp(const Eigen::Matrix<double, 6, 1>& xi);

// Angle of the relative rotation, radians.
double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

// Slerp on rotation, lerp on camera center; alpha in [0,1].
Pose interpolate_pose(const Pose& a, const Pose& b, double alpha);

// World-frame ray through a (continuous) pixel.
struct Ray {
  Point3 origin;
  Eigen::Vector3d dir;  // unit
};
Ray pixel_ray(const Pose& pose, const CameraIntrinsics& k, const ImagePoint& uv);

// Ray/horizontal-plane intersection; empty when parallel or hit behind origin.
std::optional<Point3> intersect_horizontal_plane(const Ray& ray, double plane_z);

}  // namespace pvd
