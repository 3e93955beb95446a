#include "pvd/core/json.hpp"

namespace pvd {

Json to_json(const Pose& p) {
  return Json{
      {"rotation", {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}},
      {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}},
  };
}

Pose pose_from_json(const Json& j) {
  Pose p;
  const auto& q = j.at("rotation");
  p.rotation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                                  q.at(3).get<double>())
                   .normalized();
  const auto& t = j.at("translation");
  p.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  return p;
}

Json to_json(const CameraIntrinsics& k) {
  return Json{{"fx", k.fx}, {"fy", k.fy},       {"cx", k.cx},
              {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  CameraIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  k.validate();
  return k;
}

Json to_json(const BoundingBox2D& b) {
  return Json{{"box", {b.x_min, b.y_min, b.x_max, b.y_max}},
              {"category", to_string(b.category)},
              {"score", b.score}};
}

BoundingBox2D box2d_from_json(const Json& j) {
  BoundingBox2D b;
  const auto& v = j.at("box");
  b.x_min = v.at(0).get<double>();
  b.y_min = v.at(1).get<double>();
  b.x_max = v.at(2).get<double>();
  b.y_max = v.at(3).get<double>();
  b.category = category_from_string(j.at("category").get<std::string>());
  b.score = j.value("score", 1.0);
  return b;
}

Json to_json(const BoundingBox3D& b) {
  return Json{{"id", b.id},
              {"center", {b.center.x(), b.center.y(), b.center.z()}},
              {"extents", {b.extents.x(), b.extents.y(), b.extents.z()}},
              {"yaw", b.yaw},
              {"category", to_string(b.category)},
              {"state", to_string(b.state)}};
}

BoundingBox3D box3d_from_json(const Json& j) {
  BoundingBox3D b;
  b.id = j.at("id").get<int>();
  const auto& c = j.at("center");
  b.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
  const auto& e = j.at("extents");
  b.extents = {e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()};
  b.yaw = j.at("yaw").get<double>();
  b.category = category_from_string(j.at("category").get<std::string>());
  b.state = box_state_from_string(j.at("state").get<std::string>());
  return b;
}

}  // namespace pvd
