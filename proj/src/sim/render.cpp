#include "pvd/sim/render.hpp"

#include <cmath>
#include <limits>

#include "pvd/core/errors.hpp"

namespace pvd {

SurfaceSample sample_surface(const SceneModel& scene, const Ray& ray, double t) {
  SurfaceSample best;
  double best_t = std::numeric_limits<double>::infinity();

  if (auto hit = intersect_horizontal_plane(ray, 0.0)) {
    best.id = 0;
    best.world = *hit;
    best.local = {hit->x(), hit->y()};
    best_t = (hit->z() - ray.origin.z()) / ray.dir.z();
  }

  for (std::size_t k = 0; k < scene.cars.size(); ++k) {
    const CarSpec& car = scene.cars[k];
    auto hit = intersect_horizontal_plane(ray, car.height);
    if (!hit) continue;
    const double ray_t = (car.height - ray.origin.z()) / ray.dir.z();
    if (ray_t >= best_t) continue;
    const Eigen::Vector2d d = Eigen::Rotation2Dd(-car.footprint_yaw) *
                              (Eigen::Vector2d{hit->x(), hit->y()} - car.center_at(t));
    if (std::abs(d.x()) > car.footprint_half_extents.x() ||
        std::abs(d.y()) > car.footprint_half_extents.y())
      continue;
    best.id = 1 + static_cast<int>(k);
    best.world = *hit;
    best.local = d;
    best_t = ray_t;
  }
  return best;
}

double surface_intensity(const SceneModel& scene, const SurfaceSample& s) {
  if (s.id < 0) return 0.0;
  if (s.id == 0)
    return scene.ground_style.offset +
           scene.ground_style.scale * value_noise(s.local.x(), s.local.y(), scene.ground_style.noise);
  NoiseParams np = scene.car_style.noise;
  np.seed = scene.cars[s.id - 1].texture_seed;
  return scene.car_style.offset + scene.car_style.scale * value_noise(s.local.x(), s.local.y(), np);
}

namespace {

// The world point under a sample after dt seconds of surface motion.
Point3 advect(const SceneModel& scene, const SurfaceSample& s, double dt) {
  if (s.id <= 0) return s.world;
  const CarSpec& car = scene.cars[s.id - 1];
  return s.world + Point3{car.velocity.x() * dt, car.velocity.y() * dt, 0.0};
}

std::vector<SurfaceSample> sample_pass(const SceneModel& scene, const Pose& pose, double t) {
  const CameraIntrinsics& k = scene.intrinsics;
  std::vector<SurfaceSample> samples(static_cast<std::size_t>(k.width) * k.height);
  for (int v = 0; v < k.height; ++v)
    for (int u = 0; u < k.width; ++u)
      samples[static_cast<std::size_t>(v) * k.width + u] =
          sample_surface(scene, pixel_ray(pose, k, {double(u), double(v)}), t);
  return samples;
}

Grid image_from_samples(const SceneModel& scene, const std::vector<SurfaceSample>& samples) {
  const CameraIntrinsics& k = scene.intrinsics;
  Grid img(k.width, k.height);
  for (int v = 0; v < k.height; ++v)
    for (int u = 0; u < k.width; ++u)
      img.at(u, v) = static_cast<float>(
          surface_intensity(scene, samples[static_cast<std::size_t>(v) * k.width + u]));
  return img;
}

FlowField flow_from_samples(const SceneModel& scene, const std::vector<SurfaceSample>& samples,
                            double t, double dt) {
  const CameraIntrinsics& k = scene.intrinsics;
  const Pose pose2 = scene.pose_at(t + dt);
  const std::vector<SurfaceSample> samples2 = sample_pass(scene, pose2, t + dt);

  FlowField flow(k.width, k.height, true);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const SurfaceSample& s = samples[static_cast<std::size_t>(v) * k.width + u];
      bool ok = s.id >= 0;
      ImagePoint uv2{double(u), double(v)};
      if (ok) {
        try {
          uv2 = project(pose2.apply(advect(scene, s, dt)), k);
        } catch (const DepthNonPositive&) {
          ok = false;
        }
      }
      flow.du.at(u, v) = static_cast<float>(uv2.x() - u);
      flow.dv.at(u, v) = static_cast<float>(uv2.y() - v);
      if (ok && in_sample_bounds(k.width, k.height, uv2.x(), uv2.y())) {
        // Occluded if any bilinear neighbour of the landing point sees a
        // different surface; the 1 px dilation keeps interpolated brightness
        // constancy intact right up to the mask boundary.
        const int u0 = static_cast<int>(std::floor(uv2.x()));
        const int v0 = static_cast<int>(std::floor(uv2.y()));
        for (int dv_n = 0; dv_n <= 1 && ok; ++dv_n)
          for (int du_n = 0; du_n <= 1 && ok; ++du_n) {
            const int un = u0 + du_n, vn = v0 + dv_n;
            if (un < 0 || un >= k.width || vn < 0 || vn >= k.height) continue;
            if (samples2[static_cast<std::size_t>(vn) * k.width + un].id != s.id) ok = false;
          }
      } else {
        ok = false;
      }
      flow.valid.at(u, v) = ok ? 1 : 0;
    }
  }
  return flow;
}

}  // namespace

Grid render_image(const SceneModel& scene, double t) {
  return image_from_samples(scene, sample_pass(scene, scene.pose_at(t), t));
}

FlowField render_gt_flow(const SceneModel& scene, double t, double dt) {
  return flow_from_samples(scene, sample_pass(scene, scene.pose_at(t), t), t, dt);
}

std::vector<BoundingBox2D> ground_truth_boxes(const SceneModel& scene, double t,
                                              std::vector<int>* car_ids,
                                              double min_visible_fraction) {
  const CameraIntrinsics& k = scene.intrinsics;
  const Pose pose = scene.pose_at(t);
  std::vector<BoundingBox2D> boxes;
  if (car_ids) car_ids->clear();

  for (std::size_t i = 0; i < scene.cars.size(); ++i) {
    const CarSpec& car = scene.cars[i];
    const Polygon2 fp = car.footprint_at(t);
    double u_min = std::numeric_limits<double>::infinity(), v_min = u_min;
    double u_max = -u_min, v_max = -u_min;
    bool behind = false;
    for (const auto& c : fp) {
      for (double z : {0.0, car.height}) {
        try {
          const ImagePoint uv = project(pose.apply({c.x(), c.y(), z}), k);
          u_min = std::min(u_min, uv.x());
          u_max = std::max(u_max, uv.x());
          v_min = std::min(v_min, uv.y());
          v_max = std::max(v_max, uv.y());
        } catch (const DepthNonPositive&) {
          behind = true;
        }
      }
    }
    if (behind || u_min >= u_max || v_min >= v_max) continue;
    const double full_area = (u_max - u_min) * (v_max - v_min);
    const double cu_min = std::max(u_min, 0.0), cu_max = std::min(u_max, k.width - 1.0);
    const double cv_min = std::max(v_min, 0.0), cv_max = std::min(v_max, k.height - 1.0);
    if (cu_min >= cu_max || cv_min >= cv_max) continue;
    if ((cu_max - cu_min) * (cv_max - cv_min) < min_visible_fraction * full_area) continue;

    BoundingBox2D box;
    box.x_min = cu_min;
    box.y_min = cv_min;
    box.x_max = cu_max;
    box.y_max = cv_max;
    box.category = car.category;
    box.score = 1.0;
    boxes.push_back(box);
    if (car_ids) car_ids->push_back(static_cast<int>(i));
  }
  return boxes;
}

std::vector<TrackObservation> ground_truth_tracks(const SceneModel& scene, double t) {
  const CameraIntrinsics& k = scene.intrinsics;
  const Pose pose = scene.pose_at(t);
  const Point3 center = pose.center();
  std::vector<TrackObservation> tracks;

  for (std::size_t i = 0; i < scene.landmarks.size(); ++i) {
    const Point3& lm = scene.landmarks[i];
    ImagePoint uv;
    try {
      uv = project(pose.apply(lm), k);
    } catch (const DepthNonPositive&) {
      continue;
    }
    if (!in_sample_bounds(k.width, k.height, uv.x(), uv.y())) continue;

    bool blocked = false;  // line of sight vs every cardboard roof
    for (const auto& car : scene.cars) {
      if (car.height <= lm.z() || car.height >= center.z()) continue;
      const double s = (car.height - center.z()) / (lm.z() - center.z());
      if (s <= 0.0 || s >= 1.0) continue;
      const Point3 q = center + s * (lm - center);
      const Eigen::Vector2d d = Eigen::Rotation2Dd(-car.footprint_yaw) *
                                (Eigen::Vector2d{q.x(), q.y()} - car.center_at(t));
      if (std::abs(d.x()) <= car.footprint_half_extents.x() &&
          std::abs(d.y()) <= car.footprint_half_extents.y()) {
        blocked = true;
        break;
      }
    }
    if (!blocked) tracks.push_back({static_cast<int>(i), uv});
  }
  return tracks;
}

FrameTruth render_frame(const SceneModel& scene, double t) {
  FrameTruth ft;
  ft.time = t;
  ft.pose = scene.pose_at(t);

  const auto samples = sample_pass(scene, ft.pose, t);
  ft.image = image_from_samples(scene, samples);
  if (t + scene.frame_dt <= scene.t_end() + 1e-9)
    ft.flow = flow_from_samples(scene, samples, t, scene.frame_dt);
  else
    ft.flow = FlowField(scene.intrinsics.width, scene.intrinsics.height, false);
  ft.boxes = ground_truth_boxes(scene, t, &ft.box_car_ids);
  ft.tracks = ground_truth_tracks(scene, t);
  return ft;
}

}  // namespace pvd
