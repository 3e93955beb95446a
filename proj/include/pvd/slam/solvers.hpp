#pragma once

#include <vector>

#include "pvd/slam/map.hpp"

namespace pvd {

// Reprojection residual u_obs - project(pose * x_world) and, when requested,
// its Jacobian with respect to a left-multiplied se(3) update
// pose' = exp(xi) * pose, xi = (v, omega).
void pnp_residual(const Pose& pose, const Point3& x_world, const ImagePoint& u_obs,
                  const CameraIntrinsics& k, Eigen::Vector2d* residual,
                  Eigen::Matrix<double, 2, 6>* jacobian);

struct PnpResult {
  Pose pose;
  CorrespondenceSet corr;  // inlier flags set from final reprojection errors
  int num_inliers = 0;
};

// Huber-robustified Gauss-Newton with multiplicative damping. pairs index
// (observations, points). Throws Degenerate (< 6 pairs or normal-matrix
// condition number > 1e12) and Diverged (5 consecutive rejected steps).
PnpResult solve_pnp(const CorrespondenceSet& corr, const std::vector<ImagePoint>& observations,
                    const std::vector<Point3>& points, const CameraIntrinsics& k,
                    const Pose& init, const SlamConfig& cfg);

// Two-view linear (DLT) triangulation. Throws DegenerateBaseline when the
// camera centres coincide or the viewing rays are within 0.5 degrees of
// parallel, NegativeDepth when the solution lands behind either camera, and
// TriangulationRejected when either reprojection error exceeds
// epsilon_inlier.
Point3 triangulate(const ImagePoint& obs_a, const Pose& pose_a, const ImagePoint& obs_b,
                   const Pose& pose_b, const CameraIntrinsics& k, double epsilon_inlier = 2.0);

// Joint pose/point refinement over the window (list of keyframe ids). The
// lowest-id window keyframe is the gauge and is never touched; observations
// from keyframes outside the window constrain points with their poses held
// fixed. Accepted steps never increase the total robust cost.
WorldMap local_bundle_adjust(const WorldMap& map, const std::vector<int>& window,
                             const SlamConfig& cfg);

}  // namespace pvd
