#include "pvd/slam/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "pvd/core/geometry.hpp"

namespace pvd {

namespace {

constexpr double kStepTol = 1e-8;
constexpr double kCondLimit = 1e12;
constexpr int kMaxRejects = 5;
constexpr double kLambdaInit = 1e-4;
constexpr double kLambdaMin = 1e-10;
// A rejected step whose cost sits within roundoff of the current cost means
// the solver is at its numerical floor, not diverging.
constexpr double kStallTol = 1e-9;
constexpr double kMinRayAngle = 0.5 * 3.141592653589793 / 180.0;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// IRLS weight rho'(e)/e for the Huber robustifier.
double huber_weight(double e, double delta) { return e <= delta ? 1.0 : delta / e; }

double huber_cost(double e, double delta) {
  return e <= delta ? 0.5 * e * e : delta * (e - 0.5 * delta);
}

}  // namespace

void pnp_residual(const Pose& pose, const Point3& x_world, const ImagePoint& u_obs,
                  const CameraIntrinsics& k, Eigen::Vector2d* residual,
                  Eigen::Matrix<double, 2, 6>* jacobian) {
  const Point3 xc = pose.apply(x_world);
  const ImagePoint proj = project(xc, k);
  if (residual) *residual = u_obs - proj;
  if (jacobian) {
    const double iz = 1.0 / xc.z();
    Eigen::Matrix<double, 2, 3> dproj;
    dproj << k.fx * iz, 0.0, -k.fx * xc.x() * iz * iz,  //
        0.0, k.fy * iz, -k.fy * xc.y() * iz * iz;
    // xc responds to the update xi = (v, omega) as xc + v + omega x xc.
    Eigen::Matrix<double, 3, 6> dxc;
    dxc.leftCols<3>() = Eigen::Matrix3d::Identity();
    dxc.rightCols<3>() = -skew(xc);
    *jacobian = -dproj * dxc;
  }
}

PnpResult solve_pnp(const CorrespondenceSet& corr, const std::vector<ImagePoint>& observations,
                    const std::vector<Point3>& points, const CameraIntrinsics& k,
                    const Pose& init, const SlamConfig& cfg) {
  cfg.validate();
  const int n = corr.size();
  if (n < 6)
    throw Degenerate("solve_pnp: need at least 6 correspondences, got " + std::to_string(n));

  auto total_cost = [&](const Pose& pose) -> double {
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2d r;
      try {
        pnp_residual(pose, points[corr.pairs[i].second], observations[corr.pairs[i].first], k, &r,
                     nullptr);
      } catch (const DepthNonPositive&) {
        return std::numeric_limits<double>::infinity();
      }
      c += huber_cost(r.norm(), cfg.huber_delta);
    }
    return c;
  };

  Pose pose = init;
  double cost = total_cost(pose);
  if (!std::isfinite(cost))
    throw DepthNonPositive("solve_pnp: map point behind the camera under the initial pose");

  double lambda = kLambdaInit;
  for (int iter = 0; iter < cfg.max_gn_iters; ++iter) {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2d r;
      Eigen::Matrix<double, 2, 6> jac;
      pnp_residual(pose, points[corr.pairs[i].second], observations[corr.pairs[i].first], k, &r,
                   &jac);
      const double w = huber_weight(r.norm(), cfg.huber_delta);
      h.noalias() += w * jac.transpose() * jac;
      g.noalias() += w * jac.transpose() * r;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(h);
    const double emin = eig.eigenvalues().minCoeff();
    const double emax = eig.eigenvalues().maxCoeff();
    if (!(emin > 0.0) || emax > kCondLimit * emin)
      throw Degenerate("solve_pnp: normal matrix condition number exceeds 1e12");

    // Damped step; grow lambda until the robust cost stops increasing.
    Eigen::Matrix<double, 6, 1> xi;
    int rejects = 0;
    bool stalled = false;
    while (true) {
      Eigen::Matrix<double, 6, 6> hd = h;
      hd.diagonal().array() += lambda * h.diagonal().array().abs();
      xi = hd.ldlt().solve(-g);
      const Pose candidate = se3_exp(xi).composed(pose);
      const double candidate_cost = total_cost(candidate);
      if (candidate_cost <= cost) {
        pose = candidate;
        cost = candidate_cost;
        lambda = std::max(lambda * 0.1, kLambdaMin);
        break;
      }
      if (candidate_cost - cost < kStallTol * (1.0 + cost)) {
        stalled = true;
        break;
      }
      lambda *= 10.0;
      if (++rejects >= kMaxRejects)
        throw Diverged("solve_pnp: cost increased for " + std::to_string(kMaxRejects) +
                       " consecutive damped steps");
    }
    if (stalled || xi.norm() < kStepTol) break;
  }

  PnpResult result;
  result.pose = pose;
  result.corr = corr;
  for (int i = 0; i < n; ++i) {
    double err = std::numeric_limits<double>::infinity();
    try {
      Eigen::Vector2d r;
      pnp_residual(pose, points[corr.pairs[i].second], observations[corr.pairs[i].first], k, &r,
                   nullptr);
      err = r.norm();
    } catch (const DepthNonPositive&) {
    }
    result.corr.inlier[i] = err < cfg.epsilon_inlier ? 1 : 0;
    result.num_inliers += result.corr.inlier[i];
  }
  return result;
}

Point3 triangulate(const ImagePoint& obs_a, const Pose& pose_a, const ImagePoint& obs_b,
                   const Pose& pose_b, const CameraIntrinsics& k, double epsilon_inlier) {
  const Ray ray_a = pixel_ray(pose_a, k, obs_a);
  const Ray ray_b = pixel_ray(pose_b, k, obs_b);
  if ((ray_a.origin - ray_b.origin).norm() < 1e-9)
    throw DegenerateBaseline("triangulate: camera centres coincide");
  const double cos_angle = std::clamp(ray_a.dir.dot(ray_b.dir), -1.0, 1.0);
  if (std::acos(cos_angle) <= kMinRayAngle)
    throw DegenerateBaseline("triangulate: viewing rays within 0.5 deg of parallel");

  Eigen::Matrix3d km;
  km << k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0;
  auto dlt_rows = [&](const Pose& pose, const ImagePoint& uv) {
    Eigen::Matrix<double, 3, 4> p;
    p.leftCols<3>() = pose.rotation.toRotationMatrix();
    p.col(3) = pose.translation;
    p = km * p;
    Eigen::Matrix<double, 2, 4> rows;
    rows.row(0) = uv.x() * p.row(2) - p.row(0);
    rows.row(1) = uv.y() * p.row(2) - p.row(1);
    return rows;
  };
  Eigen::Matrix4d a;
  a.topRows<2>() = dlt_rows(pose_a, obs_a);
  a.bottomRows<2>() = dlt_rows(pose_b, obs_b);
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d h = svd.matrixV().col(3);
  if (std::abs(h.w()) < 1e-12)
    throw DegenerateBaseline("triangulate: homogeneous solution at infinity");
  const Point3 x = h.head<3>() / h.w();

  if (pose_a.apply(x).z() <= 0.0 || pose_b.apply(x).z() <= 0.0)
    throw NegativeDepth("triangulate: point behind a camera");
  const double err_a = (project(pose_a.apply(x), k) - obs_a).norm();
  const double err_b = (project(pose_b.apply(x), k) - obs_b).norm();
  if (err_a > epsilon_inlier || err_b > epsilon_inlier)
    throw TriangulationRejected("triangulate: reprojection error " +
                                std::to_string(std::max(err_a, err_b)) + " px exceeds threshold");
  return x;
}

namespace {

struct BaObservation {
  int point_block;  // index into the variable-point array
  int pose_block;   // index into the variable-pose array, -1 when the pose is held fixed
  Pose fixed_pose;  // valid only when pose_block == -1
  ImagePoint uv;
  const CameraIntrinsics* k;
};

double ba_cost(const std::vector<BaObservation>& obs, const std::vector<Pose>& poses,
               const std::vector<Point3>& pts, double huber_delta) {
  double c = 0.0;
  for (const BaObservation& ob : obs) {
    const Pose& pose = ob.pose_block >= 0 ? poses[ob.pose_block] : ob.fixed_pose;
    Eigen::Vector2d r;
    try {
      pnp_residual(pose, pts[ob.point_block], ob.uv, *ob.k, &r, nullptr);
    } catch (const DepthNonPositive&) {
      return std::numeric_limits<double>::infinity();
    }
    c += huber_cost(r.norm(), huber_delta);
  }
  return c;
}

}  // namespace

WorldMap local_bundle_adjust(const WorldMap& map, const std::vector<int>& window,
                             const SlamConfig& cfg) {
  cfg.validate();
  if (window.empty()) throw DomainError("local_bundle_adjust: empty keyframe window");

  WorldMap out = map;
  std::map<int, int> kf_index;  // keyframe id -> index in out.keyframes
  for (int i = 0; i < static_cast<int>(out.keyframes.size()); ++i)
    kf_index[out.keyframes[i].id] = i;
  for (int id : window)
    if (!kf_index.count(id))
      throw DomainError("local_bundle_adjust: window references unknown keyframe " +
                        std::to_string(id));

  std::vector<int> window_ids(window);
  std::sort(window_ids.begin(), window_ids.end());
  window_ids.erase(std::unique(window_ids.begin(), window_ids.end()), window_ids.end());
  const int gauge_id = window_ids.front();

  std::map<int, int> pose_block;  // keyframe id -> variable pose block
  for (int id : window_ids)
    if (id != gauge_id) {
      const int block = static_cast<int>(pose_block.size());
      pose_block[id] = block;
    }

  // A point is variable when some window keyframe observes it; observations
  // from outside the window still constrain it through their fixed poses.
  std::vector<int> point_ids;
  std::vector<BaObservation> obs;
  cfg.intrinsics.validate();
  const CameraIntrinsics* k = &cfg.intrinsics;
  for (int m = 0; m < static_cast<int>(out.map_points.size()); ++m) {
    bool in_window = false;
    for (const auto& [kf_id, kp] : out.map_points[m].observations)
      if (std::binary_search(window_ids.begin(), window_ids.end(), kf_id)) in_window = true;
    if (!in_window) continue;
    const int block = static_cast<int>(point_ids.size());
    point_ids.push_back(m);
    for (const auto& [kf_id, kp] : out.map_points[m].observations) {
      auto it = kf_index.find(kf_id);
      if (it == kf_index.end()) continue;
      const Keyframe& frame = out.keyframes[it->second];
      BaObservation ob;
      ob.point_block = block;
      auto pit = pose_block.find(kf_id);
      ob.pose_block = pit == pose_block.end() ? -1 : pit->second;
      if (ob.pose_block < 0) ob.fixed_pose = frame.pose;
      ob.uv = frame.keypoints[kp].position;
      ob.k = k;
      obs.push_back(ob);
    }
  }
  if (point_ids.empty()) return out;

  std::vector<Pose> poses(pose_block.size());
  for (const auto& [id, block] : pose_block) poses[block] = out.keyframes[kf_index[id]].pose;
  std::vector<Point3> pts(point_ids.size());
  for (int i = 0; i < static_cast<int>(point_ids.size()); ++i)
    pts[i] = out.map_points[point_ids[i]].position;

  const int np = 6 * static_cast<int>(poses.size());
  const int dim = np + 3 * static_cast<int>(pts.size());

  double cost = ba_cost(obs, poses, pts, cfg.huber_delta);
  if (!std::isfinite(cost))
    throw DepthNonPositive("local_bundle_adjust: observation behind its camera at the start");

  double lambda = kLambdaInit;
  for (int iter = 0; iter < cfg.max_gn_iters; ++iter) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (const BaObservation& ob : obs) {
      const Pose& pose = ob.pose_block >= 0 ? poses[ob.pose_block] : ob.fixed_pose;
      const Point3 xc = pose.apply(pts[ob.point_block]);
      const ImagePoint proj = project(xc, *ob.k);
      const Eigen::Vector2d r = ob.uv - proj;
      const double iz = 1.0 / xc.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << ob.k->fx * iz, 0.0, -ob.k->fx * xc.x() * iz * iz,  //
          0.0, ob.k->fy * iz, -ob.k->fy * xc.y() * iz * iz;
      const double w = huber_weight(r.norm(), cfg.huber_delta);
      const Eigen::Matrix<double, 2, 3> jp = -dproj * pose.rotation.toRotationMatrix();
      const int pc = np + 3 * ob.point_block;
      h.block<3, 3>(pc, pc).noalias() += w * jp.transpose() * jp;
      g.segment<3>(pc).noalias() += w * jp.transpose() * r;
      if (ob.pose_block >= 0) {
        Eigen::Matrix<double, 3, 6> dxc;
        dxc.leftCols<3>() = Eigen::Matrix3d::Identity();
        dxc.rightCols<3>() = -skew(xc);
        const Eigen::Matrix<double, 2, 6> jt = -dproj * dxc;
        const int tc = 6 * ob.pose_block;
        h.block<6, 6>(tc, tc).noalias() += w * jt.transpose() * jt;
        h.block<6, 3>(tc, pc).noalias() += w * jt.transpose() * jp;
        h.block<3, 6>(pc, tc).noalias() += w * jp.transpose() * jt;
        g.segment<6>(tc).noalias() += w * jt.transpose() * r;
      }
    }

    Eigen::VectorXd delta;
    int rejects = 0;
    bool stalled = false;
    std::vector<Pose> cand_poses;
    std::vector<Point3> cand_pts;
    while (true) {
      Eigen::MatrixXd hd = h;
      hd.diagonal().array() += lambda * (h.diagonal().array().abs() + 1e-9);
      delta = hd.ldlt().solve(-g);
      cand_poses = poses;
      cand_pts = pts;
      for (int b = 0; b < static_cast<int>(poses.size()); ++b)
        cand_poses[b] = se3_exp(delta.segment<6>(6 * b)).composed(poses[b]);
      for (int p = 0; p < static_cast<int>(pts.size()); ++p)
        cand_pts[p] = pts[p] + delta.segment<3>(np + 3 * p);
      const double cand_cost = ba_cost(obs, cand_poses, cand_pts, cfg.huber_delta);
      if (cand_cost <= cost) {
        poses.swap(cand_poses);
        pts.swap(cand_pts);
        cost = cand_cost;
        lambda = std::max(lambda * 0.1, kLambdaMin);
        break;
      }
      if (cand_cost - cost < kStallTol * (1.0 + cost)) {
        stalled = true;
        break;
      }
      lambda *= 10.0;
      if (++rejects >= kMaxRejects)
        throw Diverged("local_bundle_adjust: cost increased for " + std::to_string(kMaxRejects) +
                       " consecutive damped steps");
    }
    if (stalled || delta.norm() < kStepTol) break;
  }

  for (const auto& [id, block] : pose_block) out.keyframes[kf_index[id]].pose = poses[block];
  for (int i = 0; i < static_cast<int>(point_ids.size()); ++i)
    out.map_points[point_ids[i]].position = pts[i];
  return out;
}

}  // namespace pvd
