#pragma once

#include <vector>

#include "pvd/core/grid.hpp"
#include "pvd/flow/field.hpp"
#include "pvd/sim/scene.hpp"

namespace pvd {

// What a pixel ray hits: the ground plane or one car roof ("cardboard" cars
// have no side faces, so a ray that misses the roof rectangle falls through).
struct SurfaceSample {
  int id = -1;               // 0 = ground, 1 + k = car k, -1 = nothing
  Point3 world{0, 0, 0};
  Eigen::Vector2d local{0, 0};  // surface-attached texture coordinates
};

SurfaceSample sample_surface(const SceneModel& scene, const Ray& ray, double t);
double surface_intensity(const SceneModel& scene, const SurfaceSample& s);

// One projected landmark.
struct TrackObservation {
  int landmark_id = -1;
  ImagePoint uv{0, 0};
};

struct FrameTruth {
  double time = 0.0;
  Pose pose;  // world -> camera
  Grid image;
  FlowField flow;  // to the next frame; all-invalid on the final frame
  std::vector<BoundingBox2D> boxes;
  std::vector<int> box_car_ids;  // parallel to boxes, index into SceneModel::cars
  std::vector<TrackObservation> tracks;

  FrameTruth() : image(0, 0), flow(0, 0, false) {}
};

Grid render_image(const SceneModel& scene, double t);

// Dense ground-truth flow from t to t + dt. du/dv are defined everywhere; the
// valid mask clears pixels whose surface point leaves the frame or becomes
// occluded (any bilinear neighbour of the target seeing a different surface).
FlowField render_gt_flow(const SceneModel& scene, double t, double dt);

// Axis-aligned boxes around each car with at least `min_visible_fraction` of
// the full projected extent inside the image. car_ids (optional) receives the
// scene car index per returned box.
std::vector<BoundingBox2D> ground_truth_boxes(const SceneModel& scene, double t,
                                              std::vector<int>* car_ids = nullptr,
                                              double min_visible_fraction = 0.4);

std::vector<TrackObservation> ground_truth_tracks(const SceneModel& scene, double t);

// Full per-frame ground truth; flow spans one frame_dt of motion.
FrameTruth render_frame(const SceneModel& scene, double t);

}  // namespace pvd
