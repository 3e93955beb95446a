#include "pvd/slam/map.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "pvd/core/errors.hpp"

namespace pvd {

void SlamConfig::validate() const {
  if (delta_obj < 1) throw DomainError("SlamConfig: delta_obj must be >= 1");
  if (!(epsilon_inlier > 0.0)) throw DomainError("SlamConfig: epsilon_inlier must be positive");
  if (!(huber_delta > 0.0)) throw DomainError("SlamConfig: huber_delta must be positive");
  if (max_gn_iters < 1) throw DomainError("SlamConfig: max_gn_iters must be >= 1");
  if (!(ratio_test > 0.0 && ratio_test <= 1.0)) throw DomainError("SlamConfig: ratio_test outside (0,1]");
  if (n_confirm < 1) throw DomainError("SlamConfig: n_confirm must be >= 1");
}

std::vector<std::pair<int, int>> associate_boxes(const CorrespondenceSet& corr,
                                                 const std::vector<Keypoint>& keypoints,
                                                 const std::vector<MapPoint>& map_points,
                                                 const std::vector<BoundingBox2D>& boxes2d,
                                                 const std::vector<BoundingBox3D>& boxes3d,
                                                 int delta_obj) {
  // counts[j][i] = |K_ij| for 2D box j, 3D box id i.
  std::vector<std::map<int, int>> counts(boxes2d.size());
  for (int p = 0; p < corr.size(); ++p) {
    if (!corr.inlier[p]) continue;
    const auto [ki, mj] = corr.pairs[p];
    const int tag = map_points[mj].box3d_tag;
    if (tag < 0) continue;
    const ImagePoint& pos = keypoints[ki].position;
    for (std::size_t j = 0; j < boxes2d.size(); ++j)
      if (boxes2d[j].contains(pos)) ++counts[j][tag];
  }

  std::vector<std::pair<int, int>> out;
  for (std::size_t j = 0; j < boxes2d.size(); ++j) {
    int best_id = -1, best_count = 0;
    for (const auto& [id, c] : counts[j]) {
      // Strict ">" on the threshold; ties between 3D boxes go to the smaller
      // id (std::map iterates ids in increasing order, so the first winner
      // sticks).
      if (c > delta_obj && c > best_count) {
        best_id = id;
        best_count = c;
      }
    }
    if (best_id >= 0) out.push_back({best_id, static_cast<int>(j)});
  }
  // Validity: ids must exist in boxes3d (debug aid; silently tolerated
  // otherwise since counting already implies existence in normal use).
  (void)boxes3d;
  return out;
}

WorldMap reidentify(const WorldMap& map,
                    const std::vector<std::vector<std::pair<int, int>>>& frame_associations,
                    int n_confirm) {
  std::map<int, int> frames_seen;  // 3D id -> number of distinct frames
  for (const auto& frame : frame_associations) {
    std::vector<int> ids;
    for (const auto& [id3d, j2d] : frame) {
      (void)j2d;
      if (std::find(ids.begin(), ids.end(), id3d) == ids.end()) ids.push_back(id3d);
    }
    for (int id : ids) ++frames_seen[id];
  }
  WorldMap out = map;
  for (BoundingBox3D& b : out.boxes3d) {
    if (b.category != Category::IPCCandidate || b.state != BoxState::Candidate) continue;
    const auto it = frames_seen.find(b.id);
    if (it != frames_seen.end() && it->second >= n_confirm) b.state = BoxState::ConfirmedIPC;
  }
  return out;
}

namespace {

nlohmann::ordered_json pose_json(const Pose& p) {
  return {{"q", {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}},
          {"t", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

Pose pose_from(const nlohmann::json& j) {
  Pose p;
  const auto& q = j.at("q");
  p.rotation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                  q.at(2).get<double>(), q.at(3).get<double>());
  const auto& t = j.at("t");
  p.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  return p;
}

nlohmann::ordered_json box2d_json(const BoundingBox2D& b) {
  return {{"rect", {b.x_min, b.y_min, b.x_max, b.y_max}},
          {"category", to_string(b.category)},
          {"score", b.score}};
}

BoundingBox2D box2d_from(const nlohmann::json& j) {
  BoundingBox2D b;
  const auto& r = j.at("rect");
  b.x_min = r.at(0).get<double>();
  b.y_min = r.at(1).get<double>();
  b.x_max = r.at(2).get<double>();
  b.y_max = r.at(3).get<double>();
  b.category = category_from_string(j.at("category").get<std::string>());
  b.score = j.at("score").get<double>();
  return b;
}

}  // namespace

std::string map_to_json(const WorldMap& map) {
  nlohmann::ordered_json j;
  j["keyframes"] = nlohmann::ordered_json::array();
  for (const Keyframe& k : map.keyframes) {
    nlohmann::ordered_json jk;
    jk["id"] = k.id;
    jk["pose"] = pose_json(k.pose);
    jk["keypoints"] = nlohmann::ordered_json::array();
    for (const Keypoint& kp : k.keypoints) {
      nlohmann::ordered_json jp;
      jp["uv"] = {kp.position.x(), kp.position.y()};
      jp["box_tag"] = kp.box_tag;
      jp["excluded"] = kp.excluded;
      // Descriptors are rebuilt from imagery when needed; storing them would
      // triple the file for no reader benefit.
      jk["keypoints"].push_back(std::move(jp));
    }
    jk["boxes"] = nlohmann::ordered_json::array();
    for (const BoundingBox2D& b : k.boxes) jk["boxes"].push_back(box2d_json(b));
    j["keyframes"].push_back(std::move(jk));
  }
  j["map_points"] = nlohmann::ordered_json::array();
  for (const MapPoint& m : map.map_points) {
    nlohmann::ordered_json jm;
    jm["position"] = {m.position.x(), m.position.y(), m.position.z()};
    jm["box3d_tag"] = m.box3d_tag;
    jm["observations"] = nlohmann::ordered_json::array();
    for (const auto& [kf, ki] : m.observations) jm["observations"].push_back({kf, ki});
    j["map_points"].push_back(std::move(jm));
  }
  j["boxes3d"] = nlohmann::ordered_json::array();
  for (const BoundingBox3D& b : map.boxes3d) {
    nlohmann::ordered_json jb;
    jb["id"] = b.id;
    jb["center"] = {b.center.x(), b.center.y(), b.center.z()};
    jb["extents"] = {b.extents.x(), b.extents.y(), b.extents.z()};
    jb["yaw"] = b.yaw;
    jb["category"] = to_string(b.category);
    jb["state"] = to_string(b.state);
    j["boxes3d"].push_back(std::move(jb));
  }
  return j.dump(2);
}

WorldMap map_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  WorldMap map;
  for (const auto& jk : j.at("keyframes")) {
    Keyframe k;
    k.id = jk.at("id").get<int>();
    k.pose = pose_from(jk.at("pose"));
    for (const auto& jp : jk.at("keypoints")) {
      Keypoint kp;
      kp.position = {jp.at("uv").at(0).get<double>(), jp.at("uv").at(1).get<double>()};
      kp.box_tag = jp.at("box_tag").get<int>();
      kp.excluded = jp.at("excluded").get<bool>();
      k.keypoints.push_back(std::move(kp));
    }
    for (const auto& jb : jk.at("boxes")) k.boxes.push_back(box2d_from(jb));
    map.keyframes.push_back(std::move(k));
  }
  for (const auto& jm : j.at("map_points")) {
    MapPoint m;
    m.position = {jm.at("position").at(0).get<double>(), jm.at("position").at(1).get<double>(),
                  jm.at("position").at(2).get<double>()};
    m.box3d_tag = jm.at("box3d_tag").get<int>();
    for (const auto& jo : jm.at("observations"))
      m.observations.push_back({jo.at(0).get<int>(), jo.at(1).get<int>()});
    map.map_points.push_back(std::move(m));
  }
  for (const auto& jb : j.at("boxes3d")) {
    BoundingBox3D b;
    b.id = jb.at("id").get<int>();
    b.center = {jb.at("center").at(0).get<double>(), jb.at("center").at(1).get<double>(),
                jb.at("center").at(2).get<double>()};
    b.extents = {jb.at("extents").at(0).get<double>(), jb.at("extents").at(1).get<double>(),
                 jb.at("extents").at(2).get<double>()};
    b.yaw = jb.at("yaw").get<double>();
    b.category = category_from_string(jb.at("category").get<std::string>());
    b.state = box_state_from_string(jb.at("state").get<std::string>());
    map.boxes3d.push_back(std::move(b));
  }
  return map;
}

void save_map(const std::string& path, const WorldMap& map) {
  std::ofstream f(path);
  if (!f) throw DomainError("save_map: cannot open " + path);
  f << map_to_json(map) << "\n";
}

WorldMap load_map(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("load_map: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return map_from_json(text);
}

}  // namespace pvd
