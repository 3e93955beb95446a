#pragma once

#include <vector>

#include "pvd/core/grid.hpp"
#include "pvd/core/types.hpp"

namespace pvd {

// Zero-mean, unit-norm 8x8 intensity patch.
using Descriptor = Eigen::Matrix<float, 64, 1>;

struct Keypoint {
  ImagePoint position{0.0, 0.0};
  Descriptor descriptor = Descriptor::Zero();
  double response = 0.0;
  int box_tag = -1;       // index of the first containing 2D box, -1 if none
  bool excluded = false;  // inside a moving-car box: never matched or mapped
};

// Harris corners (box-windowed structure tensor, k = 0.04), local-maximum
// suppressed with scan-order tie-breaks, strongest kept first. Patches too
// close to the border to describe are dropped. Corners inside any MC box are
// flagged excluded; box_tag records the first containing box regardless of
// category.
std::vector<Keypoint> extract_keypoints(const Grid& image,
                                        const std::vector<BoundingBox2D>& boxes);

// 2D-2D or 2D-3D correspondence indices with inlier flags filled in by the
// pose solvers.
struct CorrespondenceSet {
  std::vector<std::pair<int, int>> pairs;  // (index in a, index in b)
  std::vector<char> inlier;                // parallel to pairs

  void add(int i, int j) {
    pairs.push_back({i, j});
    inlier.push_back(0);
  }
  int size() const { return static_cast<int>(pairs.size()); }
};

// Mutual nearest neighbours in descriptor space, Lowe ratio applied in both
// directions; entries whose excluded flag is set never participate.
CorrespondenceSet match_descriptors(const std::vector<Descriptor>& a,
                                    const std::vector<Descriptor>& b, double ratio_test,
                                    const std::vector<char>* excluded_a = nullptr,
                                    const std::vector<char>* excluded_b = nullptr);

// Convenience: match keypoint sets respecting their excluded flags.
CorrespondenceSet match_keypoints(const std::vector<Keypoint>& a, const std::vector<Keypoint>& b,
                                  double ratio_test);

}  // namespace pvd
