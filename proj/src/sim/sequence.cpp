#include "pvd/sim/sequence.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "pvd/core/errors.hpp"
#include "pvd/io/image_io.hpp"

namespace pvd {

Sequence render_sequence(const SceneModel& scene, bool with_ground_truth_flow) {
  Sequence seq;
  seq.scene = scene;
  seq.frames.reserve(scene.trajectory.size());
  for (const auto& kf : scene.trajectory) {
    if (with_ground_truth_flow) {
      seq.frames.push_back(render_frame(scene, kf.time));
      continue;
    }
    // End-task runs estimate their own flow; skipping the reference flow
    // keeps the frames cheap. FrameTruth then carries an empty (0x0) field.
    FrameTruth ft;
    ft.time = kf.time;
    ft.pose = scene.pose_at(kf.time);
    ft.image = render_image(scene, kf.time);
    ft.boxes = ground_truth_boxes(scene, kf.time, &ft.box_car_ids);
    ft.tracks = ground_truth_tracks(scene, kf.time);
    seq.frames.push_back(std::move(ft));
  }
  return seq;
}

Json truth_to_json(const FrameTruth& ft) {
  Json boxes = Json::array();
  for (const auto& b : ft.boxes) boxes.push_back(to_json(b));
  Json tracks = Json::array();
  for (const auto& tr : ft.tracks)
    tracks.push_back(Json{{"id", tr.landmark_id}, {"uv", {tr.uv.x(), tr.uv.y()}}});
  return Json{{"time", ft.time},
              {"pose", to_json(ft.pose)},
              {"boxes", boxes},
              {"box_car_ids", ft.box_car_ids},
              {"tracks", tracks}};
}

FrameTruth truth_from_json(const Json& j) {
  FrameTruth ft;
  ft.time = j.at("time").get<double>();
  ft.pose = pose_from_json(j.at("pose"));
  for (const auto& b : j.at("boxes")) ft.boxes.push_back(box2d_from_json(b));
  ft.box_car_ids = j.at("box_car_ids").get<std::vector<int>>();
  for (const auto& tr : j.at("tracks"))
    ft.tracks.push_back(
        {tr.at("id").get<int>(), {tr.at("uv").at(0).get<double>(), tr.at("uv").at(1).get<double>()}});
  return ft;
}

namespace {

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05zu.%s", stem, i, ext);
  return buf;
}

}  // namespace

void write_sequence(const Sequence& seq, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "scene.json");
    out << scene_to_json(seq.scene).dump(2) << "\n";
  }
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const FrameTruth& ft = seq.frames[i];
    write_pgm((dir / indexed("frame", i, "pgm")).string(), ft.image);
    write_flo((dir / indexed("flow", i, "flo")).string(), ft.flow);
    std::ofstream out(dir / indexed("truth", i, "json"));
    out << truth_to_json(ft).dump(2) << "\n";
  }
}

Sequence read_sequence(const std::filesystem::path& dir) {
  Sequence seq;
  {
    std::ifstream in(dir / "scene.json");
    if (!in) throw Error("cannot open " + (dir / "scene.json").string());
    Json j;
    in >> j;
    seq.scene = scene_from_json(j);
  }
  for (std::size_t i = 0;; ++i) {
    const auto truth_path = dir / indexed("truth", i, "json");
    std::ifstream in(truth_path);
    if (!in) break;
    Json j;
    in >> j;
    FrameTruth ft = truth_from_json(j);
    ft.image = read_pgm((dir / indexed("frame", i, "pgm")).string());
    ft.flow = read_flo((dir / indexed("flow", i, "flo")).string());
    seq.frames.push_back(std::move(ft));
  }
  return seq;
}

}  // namespace pvd
