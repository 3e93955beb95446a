#include "pvd/sim/scene.hpp"

#include <algorithm>
#include <cmath>

#include "pvd/core/errors.hpp"
#include "pvd/core/rng.hpp"

namespace pvd {

void SceneParams::validate() const {
  if (num_mc < 0 || num_lpc < 0 || num_ipc < 0) throw DomainError("scene params: negative car count");
  if (num_ipc_departing > num_ipc) throw DomainError("scene params: more departing than IPC candidates");
  if (image_width < 16 || image_height < 16) throw DomainError("scene params: image too small");
  if (altitude <= 0 || speed <= 0 || fps <= 0 || duration <= 0)
    throw DomainError("scene params: non-positive extent");
}

Pose SceneModel::pose_at(double t) const {
  if (trajectory.empty()) throw TimeOutOfRange("empty trajectory");
  const double eps = 1e-9;
  if (t < t_begin() - eps || t > t_end() + eps) throw TimeOutOfRange("t outside trajectory span");
  t = std::clamp(t, t_begin(), t_end());
  auto it = std::lower_bound(trajectory.begin(), trajectory.end(), t,
                             [](const TrajectoryKeyframe& k, double v) { return k.time < v; });
  if (it == trajectory.begin()) return it->pose;
  if (it == trajectory.end()) return trajectory.back().pose;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double alpha = (t - a.time) / (b.time - a.time);
  return interpolate_pose(a.pose, b.pose, alpha);
}

Pose make_camera_pose(const Eigen::Vector3d& center, double yaw, double pitch, double roll) {
  // Nadir base frame: camera x -> world x, camera y -> world -y, camera z -> world -z.
  Eigen::Matrix3d base;
  base << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  const Eigen::Matrix3d r_wc = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix() *
                               Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()).toRotationMatrix() *
                               base * Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  Pose pose;
  pose.rotation = Eigen::Quaterniond(r_wc.transpose()).normalized();
  pose.translation = -(pose.rotation * center);
  return pose;
}

namespace {

constexpr double kSpotHalfX = 2.6, kSpotHalfY = 1.3;
constexpr double kSpotPitch = 6.2;
constexpr double kSpotRowY = 5.5;
constexpr double kIpcRowY = -5.5;
constexpr double kLaneY = 1.6;

std::vector<TrajectoryKeyframe> make_trajectory(const SceneParams& p, Rng rng) {
  double phase[5];
  for (auto& ph : phase) ph = rng.uniform(0.0, 2.0 * 3.141592653589793);
  const int n = static_cast<int>(std::round(p.duration * p.fps));
  const double dt = 1.0 / p.fps;
  const double w = p.wobble;
  std::vector<TrajectoryKeyframe> traj;
  traj.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    auto osc = [&](double amp, double period, double ph) {
      return amp * w * std::sin(2.0 * 3.141592653589793 * t / period + ph);
    };
    const Eigen::Vector3d center{p.speed * t, osc(0.35, 5.1, phase[0]), p.altitude + osc(0.08, 6.3, phase[1])};
    // Rotational amplitudes stay small: frame-to-frame yaw/roll rate shows up
    // as radius-dependent image flow, and parked-car classification compares
    // each box against a single global ego-flow median, so that differential
    // component must stay well under the moving-car threshold.
    const double yaw = osc(0.004, 4.7, phase[2]);
    const double pitch = p.pitch_deg * 3.141592653589793 / 180.0 + osc(0.008, 3.9, phase[3]);
    const double roll = osc(0.005, 4.3, phase[4]);
    traj.push_back({t, make_camera_pose(center, yaw, pitch, roll)});
  }
  return traj;
}

CarSpec make_parked_car(Rng& rng, Category category, const Eigen::Vector2d& center) {
  CarSpec car;
  car.footprint_center = center;
  car.footprint_half_extents = {2.1 * rng.uniform(0.9, 1.05), 0.95 * rng.uniform(0.9, 1.05)};
  car.height = rng.uniform(1.4, 1.7);
  car.category = category;
  car.texture_seed = rng.next_u64();
  return car;
}

}  // namespace

SceneModel generate_scene(std::uint64_t seed, const SceneParams& params) {
  params.validate();
  SceneModel scene;
  Rng rng(hash_combine(seed, 0x5ce9eULL));

  scene.ground_plane_texture_seed = rng.next_u64();
  scene.frame_dt = 1.0 / params.fps;
  scene.tau_spot = params.tau_spot;

  // Cars may sit a little beyond the path ends; the wide field of view keeps
  // them on screen for most of the flight anyway.
  const double path_len = params.speed * params.duration;
  const double x_lo = -4.0, x_hi = std::max(x_lo + 1.0, path_len + 4.0);

  // Intrinsics sized for a ~78 degree horizontal field of view.
  scene.intrinsics.fx = scene.intrinsics.fy = 0.62 * params.image_width;
  scene.intrinsics.cx = (params.image_width - 1) / 2.0;
  scene.intrinsics.cy = (params.image_height - 1) / 2.0;
  scene.intrinsics.width = params.image_width;
  scene.intrinsics.height = params.image_height;

  // Texture detail scaled to the ground sampling distance so that rendered
  // images stay band-limited at any configured resolution. Six octaves put
  // the finest detail near a 3 px wavelength: coarse structure for the
  // pyramid matcher plus corner-scale detail the feature detector can hold
  // on to.
  const double gsd = params.altitude / scene.intrinsics.fx;
  scene.ground_style.noise = {scene.ground_plane_texture_seed, 110.0 * gsd, 6, 0.70, 2.03};
  scene.ground_style.offset = 0.40;
  scene.ground_style.scale = 0.55;
  // Same octave family as the ground so car texture survives coarse pyramid
  // levels (a matcher that cannot see a car at coarse scales cannot lock onto
  // large car motion); distinct intensity band keeps boundary edges strong.
  // Higher contrast than the ground: car roofs are small and re-identification
  // needs a healthy corner count on each one.
  scene.car_style.noise = {0, 120.0 * gsd, 6, 0.70, 2.03};
  scene.car_style.offset = 0.12;
  scene.car_style.scale = 0.62;

  // Parking spots in one row; at least two stay empty.
  const int max_spots = static_cast<int>((x_hi - x_lo) / kSpotPitch) + 1;
  const int num_spots = std::min(max_spots, params.num_lpc + 2);
  if (num_spots < params.num_lpc)
    throw InfeasiblePlacement("not enough parking spots along the trajectory");
  for (int i = 0; i < num_spots; ++i) {
    const Eigen::Vector2d c{x_lo + kSpotPitch * i, kSpotRowY};
    scene.parking_spots.push_back(oriented_rect(c, {kSpotHalfX, kSpotHalfY}, 0.0));
  }

  // LPCs occupy a deterministic-random subset of the spots.
  std::vector<int> spot_order(num_spots);
  for (int i = 0; i < num_spots; ++i) spot_order[i] = i;
  for (int i = num_spots - 1; i > 0; --i) std::swap(spot_order[i], spot_order[rng.uniform_int(0, i)]);
  for (int i = 0; i < params.num_lpc; ++i) {
    const Eigen::Vector2d spot_center{x_lo + kSpotPitch * spot_order[i], kSpotRowY};
    const Eigen::Vector2d jitter{rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)};
    scene.cars.push_back(make_parked_car(rng, Category::LPC, spot_center + jitter));
  }

  // IPC candidates park on the opposite roadside, off any spot.
  std::vector<double> ipc_x;
  for (int i = 0; i < params.num_ipc; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      const double x = rng.uniform(x_lo, x_hi);
      bool clear = true;
      for (double other : ipc_x)
        if (std::abs(x - other) < 5.4) clear = false;
      if (clear) {
        ipc_x.push_back(x);
        CarSpec car = make_parked_car(
            rng, Category::IPCCandidate, {x, kIpcRowY + rng.uniform(-0.3, 0.3)});
        car.departs = i < params.num_ipc_departing;
        scene.cars.push_back(car);
        placed = true;
      }
    }
    if (!placed) throw InfeasiblePlacement("could not place IPC candidate without overlap");
  }

  // Moving cars on the two lanes; lanes never conflict with the parked rows.
  // Oncoming traffic drives slower: its image motion is the drone's plus its
  // own, and staying within the matcher's pyramid capture range keeps the
  // scenes solvable by design.
  for (int i = 0; i < params.num_mc; ++i) {
    const bool southbound = (i % 2) == 1;
    CarSpec car = make_parked_car(rng, Category::MC, {rng.uniform(x_lo, x_hi), southbound ? kLaneY : -kLaneY});
    car.velocity = {southbound ? -0.6 * params.mc_speed : params.mc_speed, 0.0};
    bool clear = true;  // same-lane spacing over the whole sequence
    for (const auto& other : scene.cars) {
      if (other.category != Category::MC) continue;
      if (std::abs(other.footprint_center.y() - car.footprint_center.y()) > 0.5) continue;
      for (double t = 0.0; t <= params.duration; t += 0.25)
        if ((other.center_at(t) - car.center_at(t)).norm() < 5.5) clear = false;
    }
    if (!clear) {
      bool placed = false;
      for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
        car.footprint_center.x() = rng.uniform(x_lo, x_hi);
        placed = true;
        for (const auto& other : scene.cars) {
          if (other.category != Category::MC) continue;
          if (std::abs(other.footprint_center.y() - car.footprint_center.y()) > 0.5) continue;
          for (double t = 0.0; t <= params.duration; t += 0.25)
            if ((other.center_at(t) - car.center_at(t)).norm() < 5.5) placed = false;
        }
      }
      if (!placed) throw InfeasiblePlacement("could not place moving car without conflict");
    }
    scene.cars.push_back(car);
  }

  // Enforce label/geometry consistency the classifier relies on.
  for (const auto& car : scene.cars) {
    const double overlap = overlap_fraction(car.footprint_at(0.0), scene.parking_spots);
    if (car.category == Category::LPC && overlap < scene.tau_spot)
      throw InfeasiblePlacement("legally parked car not inside a spot");
    if (car.category == Category::IPCCandidate && overlap >= scene.tau_spot)
      throw InfeasiblePlacement("IPC candidate overlaps a spot");
  }

  scene.trajectory = make_trajectory(params, rng.fork(0x7247ULL));

  // Static ground landmarks on a coarse lattice.
  for (double x = -2.0; x <= path_len + 2.0; x += 2.5)
    for (double y = -8.0; y <= 8.0; y += 2.5)
      scene.landmarks.push_back({x + 0.13, y + 0.07, 0.0});

  return scene;
}

SceneModel investigation_view(const SceneModel& scene, std::uint64_t seed) {
  SceneModel out = scene;
  out.cars.clear();
  int num_mc = 0;
  for (const auto& car : scene.cars) {
    if (car.category == Category::MC) {
      ++num_mc;  // old traffic has moved on
      continue;
    }
    if (car.departs) continue;
    out.cars.push_back(car);
  }

  Rng rng(hash_combine(seed, 0x1277e57ULL));
  const double duration = scene.t_end() - scene.t_begin();
  const double path_len = scene.trajectory.back().pose.center().x();
  const double x_lo = -4.0, x_hi = std::max(x_lo + 1.0, path_len + 4.0);
  const double mc_speed = 4.0;
  for (int i = 0; i < num_mc; ++i) {
    const bool southbound = (i % 2) == 0;
    CarSpec car = make_parked_car(rng, Category::MC, {rng.uniform(x_lo, x_hi), southbound ? kLaneY : -kLaneY});
    car.velocity = {southbound ? -0.6 * mc_speed : mc_speed, 0.0};
    out.cars.push_back(car);
  }

  // Re-fly the same nominal path with fresh perturbations.
  SceneParams traj_params;
  traj_params.speed = path_len / duration;
  traj_params.duration = duration;
  traj_params.fps = 1.0 / scene.frame_dt;
  traj_params.altitude = scene.trajectory.front().pose.center().z();
  out.trajectory = make_trajectory(traj_params, rng.fork(0x7247ULL));
  return out;
}

namespace {

Json polygon_to_json(const Polygon2& poly) {
  Json j = Json::array();
  for (const auto& p : poly) j.push_back({p.x(), p.y()});
  return j;
}

Polygon2 polygon_from_json(const Json& j) {
  Polygon2 poly;
  for (const auto& p : j) poly.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return poly;
}

Json style_to_json(const SurfaceStyle& s) {
  return Json{{"seed", s.noise.seed},
              {"base_wavelength", s.noise.base_wavelength},
              {"octaves", s.noise.octaves},
              {"gain", s.noise.gain},
              {"lacunarity", s.noise.lacunarity},
              {"offset", s.offset},
              {"scale", s.scale}};
}

SurfaceStyle style_from_json(const Json& j) {
  SurfaceStyle s;
  s.noise.seed = j.at("seed").get<std::uint64_t>();
  s.noise.base_wavelength = j.at("base_wavelength").get<double>();
  s.noise.octaves = j.at("octaves").get<int>();
  s.noise.gain = j.at("gain").get<double>();
  s.noise.lacunarity = j.at("lacunarity").get<double>();
  s.offset = j.at("offset").get<double>();
  s.scale = j.at("scale").get<double>();
  return s;
}

}  // namespace

Json scene_to_json(const SceneModel& scene) {
  Json cars = Json::array();
  for (const auto& car : scene.cars) {
    cars.push_back(Json{
        {"footprint",
         {{"center", {car.footprint_center.x(), car.footprint_center.y()}},
          {"half_extents", {car.footprint_half_extents.x(), car.footprint_half_extents.y()}},
          {"yaw", car.footprint_yaw}}},
        {"height", car.height},
        {"category", to_string(car.category)},
        {"motion", {car.velocity.x(), car.velocity.y()}},
        {"departs", car.departs},
        {"texture_seed", car.texture_seed},
    });
  }
  Json spots = Json::array();
  for (const auto& s : scene.parking_spots) spots.push_back(polygon_to_json(s));
  Json traj = Json::array();
  for (const auto& kf : scene.trajectory) traj.push_back(Json{{"time", kf.time}, {"pose", to_json(kf.pose)}});
  Json landmarks = Json::array();
  for (const auto& p : scene.landmarks) landmarks.push_back({p.x(), p.y(), p.z()});
  return Json{
      {"ground_plane_texture_seed", scene.ground_plane_texture_seed},
      {"parking_spots", spots},
      {"cars", cars},
      {"trajectory", traj},
      {"intrinsics", to_json(scene.intrinsics)},
      {"ground_style", style_to_json(scene.ground_style)},
      {"car_style", style_to_json(scene.car_style)},
      {"frame_dt", scene.frame_dt},
      {"tau_spot", scene.tau_spot},
      {"landmarks", landmarks},
  };
}

SceneModel scene_from_json(const Json& j) {
  SceneModel scene;
  scene.ground_plane_texture_seed = j.at("ground_plane_texture_seed").get<std::uint64_t>();
  for (const auto& s : j.at("parking_spots")) scene.parking_spots.push_back(polygon_from_json(s));
  for (const auto& c : j.at("cars")) {
    CarSpec car;
    const auto& fp = c.at("footprint");
    car.footprint_center = {fp.at("center").at(0).get<double>(), fp.at("center").at(1).get<double>()};
    car.footprint_half_extents = {fp.at("half_extents").at(0).get<double>(),
                                  fp.at("half_extents").at(1).get<double>()};
    car.footprint_yaw = fp.at("yaw").get<double>();
    car.height = c.at("height").get<double>();
    car.category = category_from_string(c.at("category").get<std::string>());
    car.velocity = {c.at("motion").at(0).get<double>(), c.at("motion").at(1).get<double>()};
    car.departs = c.value("departs", false);
    car.texture_seed = c.at("texture_seed").get<std::uint64_t>();
    scene.cars.push_back(car);
  }
  for (const auto& k : j.at("trajectory"))
    scene.trajectory.push_back({k.at("time").get<double>(), pose_from_json(k.at("pose"))});
  scene.intrinsics = intrinsics_from_json(j.at("intrinsics"));
  scene.ground_style = style_from_json(j.at("ground_style"));
  scene.car_style = style_from_json(j.at("car_style"));
  scene.frame_dt = j.at("frame_dt").get<double>();
  scene.tau_spot = j.at("tau_spot").get<double>();
  for (const auto& p : j.at("landmarks"))
    scene.landmarks.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  return scene;
}

}  // namespace pvd
