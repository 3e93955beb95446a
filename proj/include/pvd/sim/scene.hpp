#pragma once

#include <cstdint>
#include <vector>

#include "pvd/core/geometry.hpp"
#include "pvd/core/json.hpp"
#include "pvd/core/polygon.hpp"
#include "pvd/core/types.hpp"
#include "pvd/sim/noise.hpp"

namespace pvd {

struct CarSpec {
  Eigen::Vector2d footprint_center{0, 0};
  Eigen::Vector2d footprint_half_extents{2.1, 0.95};
  double footprint_yaw = 0.0;
  double height = 1.5;
  Category category = Category::IPCCandidate;
  Eigen::Vector2d velocity{0, 0};  // m/s; zero for parked cars
  bool departs = false;            // gone by the investigation pass
  std::uint64_t texture_seed = 0;

  bool is_static() const { return velocity.x() == 0.0 && velocity.y() == 0.0; }
  Eigen::Vector2d center_at(double t) const { return footprint_center + t * velocity; }
  Polygon2 footprint_at(double t) const {
    return oriented_rect(center_at(t), footprint_half_extents, footprint_yaw);
  }
};

struct TrajectoryKeyframe {
  double time = 0.0;
  Pose pose;
};

// Material appearance of one surface class: intensity = offset + scale * noise.
struct SurfaceStyle {
  NoiseParams noise;
  double offset = 0.0;
  double scale = 1.0;
};

struct SceneModel {
  std::uint64_t ground_plane_texture_seed = 0;
  std::vector<Polygon2> parking_spots;
  std::vector<CarSpec> cars;
  std::vector<TrajectoryKeyframe> trajectory;
  CameraIntrinsics intrinsics;

  SurfaceStyle ground_style;
  SurfaceStyle car_style;  // per-car seed substituted from CarSpec::texture_seed
  double frame_dt = 0.1;
  double tau_spot = 0.7;                    // label/geometry consistency threshold
  std::vector<Point3> landmarks;            // static ground-truth track points

  double t_begin() const { return trajectory.front().time; }
  double t_end() const { return trajectory.back().time; }
  // Interpolated pose; throws TimeOutOfRange outside the trajectory span.
  Pose pose_at(double t) const;
};

struct SceneParams {
  int num_mc = 1;
  int num_lpc = 1;
  int num_ipc = 1;
  int num_ipc_departing = 0;  // first k IPC candidates leave before investigation
  int image_width = 960;
  int image_height = 540;
  double altitude = 30.0;   // m
  double speed = 3.0;       // drone, m/s
  double mc_speed = 6.0;    // moving cars, m/s
  double fps = 10.0;
  double duration = 6.0;    // s
  double pitch_deg = 6.0;   // forward tilt off nadir
  double wobble = 1.0;      // trajectory perturbation scale
  double tau_spot = 0.7;

  void validate() const;
};

// Deterministic function of (seed, params). Throws InfeasiblePlacement when the
// requested cars cannot be placed without overlap after bounded retries.
SceneModel generate_scene(std::uint64_t seed, const SceneParams& params);

// The revisit pass over the same world: departed cars and old moving cars are
// gone, fresh moving cars appear, and the trajectory is re-flown with new
// perturbations.
SceneModel investigation_view(const SceneModel& scene, std::uint64_t seed);

// Camera pose from center + angles; camera z looks down (pitched forward),
// image x tracks world x at zero yaw.
Pose make_camera_pose(const Eigen::Vector3d& center, double yaw, double pitch, double roll);

Json scene_to_json(const SceneModel& scene);
SceneModel scene_from_json(const Json& j);

}  // namespace pvd
