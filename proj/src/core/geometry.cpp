#include "pvd/core/geometry.hpp"

#include <cmath>

namespace pvd {

ImagePoint project(const Point3& x_cam, const CameraIntrinsics& k) {
  if (x_cam.z() <= 1e-9) throw DepthNonPositive("project: z <= 1e-9");
  return {k.fx * x_cam.x() / x_cam.z() + k.cx, k.fy * x_cam.y() / x_cam.z() + k.cy};
}

Point3 unproject(const ImagePoint& uv, const CameraIntrinsics& k, double depth) {
  return {(uv.x() - k.cx) / k.fx * depth, (uv.y() - k.cy) / k.fy * depth, depth};
}

double iou(const BoundingBox2D& a, const BoundingBox2D& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Pose se3_exp(const Eigen::Matrix<double, 6, 1>& xi) {
  const Eigen::Vector3d v = xi.head<3>();
  const Eigen::Vector3d omega = xi.tail<3>();
  const double theta = omega.norm();

  Eigen::Matrix3d omega_hat;
  omega_hat << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;

  Eigen::Matrix3d rot;
  Eigen::Matrix3d jac_left;
  if (theta < 1e-10) {
    rot = Eigen::Matrix3d::Identity() + omega_hat;
    jac_left = Eigen::Matrix3d::Identity() + 0.5 * omega_hat;
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    const Eigen::Matrix3d hat2 = omega_hat * omega_hat;
    rot = Eigen::Matrix3d::Identity() + (s / theta) * omega_hat + ((1 - c) / (theta * theta)) * hat2;
    jac_left = Eigen::Matrix3d::Identity() + ((1 - c) / (theta * theta)) * omega_hat +
               ((theta - s) / (theta * theta * theta)) * hat2;
  }

  Pose out;
  out.rotation = Eigen::Quaterniond(rot).normalized();
  out.translation = jac_left * v;
  return out;
}

double rotation_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const double d = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return 2.0 * std::acos(d);
}

Pose interpolate_pose(const Pose& a, const Pose& b, double alpha) {
  Pose out;
  out.rotation = a.rotation.slerp(alpha, b.rotation).normalized();
  const Eigen::Vector3d center = (1.0 - alpha) * a.center() + alpha * b.center();
  out.translation = -(out.rotation * center);
  return out;
}

Ray pixel_ray(const Pose& pose, const CameraIntrinsics& k, const ImagePoint& uv) {
  const Eigen::Vector3d dir_cam{(uv.x() - k.cx) / k.fx, (uv.y() - k.cy) / k.fy, 1.0};
  Ray ray;
  ray.origin = pose.center();
  ray.dir = (pose.rotation.conjugate() * dir_cam).normalized();
  return ray;
}

std::optional<Point3> intersect_horizontal_plane(const Ray& ray, double plane_z) {
  const double dz = ray.dir.z();
  if (std::abs(dz) < 1e-12) return std::nullopt;
  const double t = (plane_z - ray.origin.z()) / dz;
  if (t <= 0.0) return std::nullopt;
  return ray.origin + t * ray.dir;
}

}  // namespace pvd
