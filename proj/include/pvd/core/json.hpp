#pragma once

#include <nlohmann/json.hpp>

#include "pvd/core/types.hpp"

namespace pvd {

// Insertion-ordered JSON keeps serialized output byte-stable.
using Json = nlohmann::ordered_json;

Json to_json(const Pose& p);
Pose pose_from_json(const Json& j);

Json to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const Json& j);

Json to_json(const BoundingBox2D& b);
BoundingBox2D box2d_from_json(const Json& j);

Json to_json(const BoundingBox3D& b);
BoundingBox3D box3d_from_json(const Json& j);

}  // namespace pvd
