#pragma once

#include <string>
#include <vector>

#include "pvd/slam/features.hpp"

namespace pvd {

struct MapPoint {
  Point3 position{0, 0, 0};
  Descriptor descriptor = Descriptor::Zero();
  int box3d_tag = -1;  // id of the 3D box this point sits on, -1 for ground
  std::vector<std::pair<int, int>> observations;  // (keyframe id, keypoint index)
};

struct Keyframe {
  int id = -1;
  Pose pose;
  std::vector<Keypoint> keypoints;
  std::vector<BoundingBox2D> boxes;
};

struct WorldMap {
  std::vector<Keyframe> keyframes;
  std::vector<MapPoint> map_points;
  std::vector<BoundingBox3D> boxes3d;

  const Keyframe* find_keyframe(int id) const {
    for (const Keyframe& k : keyframes)
      if (k.id == id) return &k;
    return nullptr;
  }
};

struct SlamConfig {
  int delta_obj = 8;            // strict lower bound on shared inliers for association
  double epsilon_inlier = 2.0;  // px reprojection inlier threshold
  double huber_delta = 1.345;   // px robustifier knee
  int max_gn_iters = 30;
  double ratio_test = 0.8;
  int n_confirm = 2;  // distinct investigation frames to confirm an IPC

  // The map stores no camera; bundle adjustment and relocalization read the
  // shared intrinsics from here.
  CameraIntrinsics intrinsics;

  // Throws DomainError on violated invariants (intrinsics checked by the
  // operations that project).
  void validate() const;
};

// 2D/3D box association by counting tagged inliers: K_ij = inlier
// correspondences whose keypoint lies in 2D box j and whose map point carries
// 3D tag i; associated iff |K_ij| strictly exceeds delta_obj. Each 2D box
// pairs with at most one 3D box (largest count, then smaller 3D id).
// `pairs` maps (keypoint index -> map point index) into the provided arrays.
std::vector<std::pair<int, int>> associate_boxes(const CorrespondenceSet& corr,
                                                 const std::vector<Keypoint>& keypoints,
                                                 const std::vector<MapPoint>& map_points,
                                                 const std::vector<BoundingBox2D>& boxes2d,
                                                 const std::vector<BoundingBox3D>& boxes3d,
                                                 int delta_obj);

// Confirm parking-violation candidates: a 3D candidate box associated in at
// least n_confirm distinct investigation frames becomes ConfirmedIPC;
// never-associated candidates stay Candidate (the car departed).
// frame_associations[f] lists (3D box id, 2D box index) pairs of frame f.
WorldMap reidentify(const WorldMap& map,
                    const std::vector<std::vector<std::pair<int, int>>>& frame_associations,
                    int n_confirm);

// JSON round-trip; ordered keys so byte-identical output is reproducible.
std::string map_to_json(const WorldMap& map);
WorldMap map_from_json(const std::string& text);
void save_map(const std::string& path, const WorldMap& map);
WorldMap load_map(const std::string& path);

}  // namespace pvd
