#pragma once

#include <vector>

#include "pvd/slam/solvers.hpp"

namespace pvd {

struct RelocalizationResult {
  Pose pose;
  int keyframe_id = -1;    // place-recognition winner the pose was seeded from
  CorrespondenceSet corr;  // (query keypoint index, map point index), inliers flagged
  int num_inliers = 0;
};

// Recover the camera pose of an unposed frame against a pre-built map:
// keyframes are ranked by descriptor-vote count, the best candidates seed
// RANSAC over minimal 6-point pose hypotheses scored by epsilon_inlier
// consensus, and the winning hypothesis is refined with the full robust
// solver. Succeeds only when the refined pose keeps >= 20 inliers; otherwise
// throws RelocalizationFailed. Deterministic: the sampler runs on a fixed
// internal seed.
RelocalizationResult relocalize(const std::vector<Keypoint>& query, const WorldMap& map,
                                const SlamConfig& cfg);

}  // namespace pvd
