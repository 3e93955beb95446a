#include "pvd/slam/relocalize.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "pvd/core/geometry.hpp"
#include "pvd/core/rng.hpp"

namespace pvd {

namespace {

constexpr int kInlierFloor = 20;
constexpr int kRansacIters = 200;
constexpr int kMaxCandidates = 3;
constexpr int kMinVotes = 6;
constexpr std::uint64_t kRansacSeed = 0x9e1d5a3c0ffee123ULL;

}  // namespace

RelocalizationResult relocalize(const std::vector<Keypoint>& query, const WorldMap& map,
                                const SlamConfig& cfg) {
  cfg.validate();
  cfg.intrinsics.validate();
  if (map.keyframes.empty() || map.map_points.empty())
    throw RelocalizationFailed("relocalize: empty map");
  if (query.empty()) throw RelocalizationFailed("relocalize: no query keypoints");

  // keyframe id -> (keypoint index -> map point index)
  std::map<int, std::unordered_map<int, int>> observed;
  for (int m = 0; m < static_cast<int>(map.map_points.size()); ++m)
    for (const auto& [kf_id, kp] : map.map_points[m].observations) observed[kf_id][kp] = m;

  std::vector<ImagePoint> query_pos(query.size());
  for (int i = 0; i < static_cast<int>(query.size()); ++i) query_pos[i] = query[i].position;
  std::vector<Point3> point_pos(map.map_points.size());
  for (int m = 0; m < static_cast<int>(map.map_points.size()); ++m)
    point_pos[m] = map.map_points[m].position;

  // Vote: how many query features match a mapped feature of each keyframe.
  struct Candidate {
    int votes = 0;
    int kf_index = -1;
    CorrespondenceSet corr;  // (query index, map point index)
  };
  std::vector<Candidate> candidates;
  for (int f = 0; f < static_cast<int>(map.keyframes.size()); ++f) {
    const Keyframe& kf = map.keyframes[f];
    const auto obs_it = observed.find(kf.id);
    if (obs_it == observed.end()) continue;
    const CorrespondenceSet matches = match_keypoints(query, kf.keypoints, cfg.ratio_test);
    Candidate cand;
    cand.kf_index = f;
    for (const auto& [qi, kj] : matches.pairs) {
      const auto mp = obs_it->second.find(kj);
      if (mp == obs_it->second.end()) continue;
      cand.corr.add(qi, mp->second);
    }
    cand.votes = cand.corr.size();
    if (cand.votes >= kMinVotes) candidates.push_back(std::move(cand));
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.votes > b.votes; });

  Rng rng(kRansacSeed);
  SlamConfig hyp_cfg = cfg;
  hyp_cfg.max_gn_iters = 10;

  const int n_cand = std::min<int>(kMaxCandidates, static_cast<int>(candidates.size()));
  for (int c = 0; c < n_cand; ++c) {
    const Candidate& cand = candidates[c];
    const Pose& seed_pose = map.keyframes[cand.kf_index].pose;
    const int n = cand.corr.size();

    Pose best_pose = seed_pose;
    int best_consensus = -1;
    for (int it = 0; it < kRansacIters; ++it) {
      // Draw 6 distinct pair indices.
      int picked[6];
      int got = 0;
      while (got < 6) {
        const int idx = rng.uniform_int(0, n - 1);
        bool dup = false;
        for (int j = 0; j < got; ++j) dup |= picked[j] == idx;
        if (!dup) picked[got++] = idx;
      }
      CorrespondenceSet minimal;
      for (int j = 0; j < 6; ++j)
        minimal.add(cand.corr.pairs[picked[j]].first, cand.corr.pairs[picked[j]].second);
      Pose hyp;
      try {
        hyp = solve_pnp(minimal, query_pos, point_pos, cfg.intrinsics, seed_pose, hyp_cfg).pose;
      } catch (const Error&) {
        continue;
      }
      int consensus = 0;
      for (const auto& [qi, mi] : cand.corr.pairs) {
        try {
          Eigen::Vector2d r;
          pnp_residual(hyp, point_pos[mi], query_pos[qi], cfg.intrinsics, &r, nullptr);
          consensus += r.norm() < cfg.epsilon_inlier ? 1 : 0;
        } catch (const DepthNonPositive&) {
        }
      }
      if (consensus > best_consensus) {
        best_consensus = consensus;
        best_pose = hyp;
      }
    }
    if (best_consensus < kMinVotes) continue;

    PnpResult refined;
    try {
      refined = solve_pnp(cand.corr, query_pos, point_pos, cfg.intrinsics, best_pose, cfg);
    } catch (const Error&) {
      continue;
    }
    if (refined.num_inliers >= kInlierFloor) {
      RelocalizationResult result;
      result.pose = refined.pose;
      result.keyframe_id = map.keyframes[cand.kf_index].id;
      result.corr = refined.corr;
      result.num_inliers = refined.num_inliers;
      return result;
    }
  }
  throw RelocalizationFailed("relocalize: no pose hypothesis reached " +
                             std::to_string(kInlierFloor) + " inliers");
}

}  // namespace pvd
