#include "pvd/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "pvd/core/rng.hpp"
#include "pvd/slam/relocalize.hpp"
#include "pvd/slam/solvers.hpp"

namespace pvd {

namespace {

// Triangulated points above this height sit on a car roof; everything in
// [-kCarPointMinZ, kCarPointMinZ] is ground. Elevated points that fall inside
// no classified box (box jitter cuts roof edges off) are dropped rather than
// mis-filed as ground.
constexpr double kCarPointMinZ = 0.5;
// Sightings of the same physical car land well inside this radius; distinct
// cars are placed several meters apart.
constexpr double kBoxMergeRadius = 2.5;
// New ground triangulations accepted per frame. Cars are never capped: the
// ground only has to carry pose tracking and relocalization, while
// re-identification lives off the per-car counts.
constexpr int kGroundCapPerFrame = 40;
constexpr int kBaInterval = 4;  // keyframes between bundle adjustments
constexpr int kBaWindow = 4;
constexpr double kCarBoxHeight = 1.5;
// Pose-guided match recovery: a map point reprojecting within the radius of
// an unclaimed corner is matched when the descriptors agree this well
// (squared distance between unit-norm descriptors). The global ratio test is
// too shy near repetitive texture; with a pose in hand the search shrinks
// from the whole frame to a disk, and this threshold alone separates.
constexpr double kGuidedRadius = 6.0;
constexpr double kGuidedMaxDist2 = 0.6;
constexpr double kTpRadius = 1.5;  // m, scoring match radius

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string frame_context(const char* pass, int frame, const char* what) {
  return std::string(pass) + " frame " + std::to_string(frame) + ": " + what;
}

// Per-frame detection state shared by both passes.
struct FrameDetection {
  FlowField flow{0, 0, false};
  std::vector<BoundingBox2D> boxes;  // proposals, category = provisional MC split
  std::vector<FlowStats> stats;      // parallel to boxes
  std::vector<char> measurable;      // parallel; 0 = no valid flow in the box
  Eigen::Vector2d ego{0, 0};
};

// Flow to the next frame, proposals, and the flow-only moving/parked split.
// Boxes without any valid flow are treated as movers so their features never
// reach the map.
FrameDetection detect_frame(const FrameTruth& fr, const Grid& next_image,
                            const PipelineConfig& cfg, Rng& rng, double* flow_millis,
                            double* detect_millis) {
  FrameDetection out;
  auto t0 = Clock::now();
  out.flow = estimate_flow(fr.image, next_image, cfg.flow);
  *flow_millis += ms_since(t0);

  t0 = Clock::now();
  out.boxes = propose_boxes(fr, cfg.detect, rng);
  out.ego = ego_flow_estimate(out.flow, out.boxes);
  out.stats.resize(out.boxes.size());
  out.measurable.assign(out.boxes.size(), 1);
  for (std::size_t b = 0; b < out.boxes.size(); ++b) {
    try {
      out.stats[b] = flow_stats(out.flow, out.boxes[b], out.ego);
    } catch (const EmptyBox&) {
      out.measurable[b] = 0;
    }
    const bool moving = !out.measurable[b] || out.stats[b].residual_mag > cfg.detect.tau_mc;
    out.boxes[b].category = moving ? Category::MC : Category::IPCCandidate;
  }
  *detect_millis += ms_since(t0);
  return out;
}

// LPC/candidate refinement once the camera pose is known. Movers keep their
// flow-based label (classify_box applies the identical residual rule).
void classify_with_pose(FrameDetection& det, const std::vector<Polygon2>& spots,
                        const CameraIntrinsics& k, const Pose& pose, const DetectConfig& cfg) {
  for (std::size_t b = 0; b < det.boxes.size(); ++b) {
    if (!det.measurable[b]) continue;
    const Classification c = classify_box(det.boxes[b], det.stats[b], spots, k, pose, cfg);
    det.boxes[b].category = c.category;
    det.boxes[b].score = c.score;
  }
}

bool parked(Category c) { return c == Category::LPC || c == Category::IPCCandidate; }

struct BoxBookkeeping {
  std::vector<Eigen::Vector2d> xy_sum;
  std::vector<int> obs_count;
  std::vector<int> candidate_votes;
  std::vector<int> lpc_votes;
  std::vector<int> first_frame;
  std::vector<int> last_frame;
};

// Find the 3D box this sighting belongs to, or mint a new one.
int find_or_create_box(WorldMap& map, BoxBookkeeping& bk, const Eigen::Vector2d& xy, int frame) {
  int best = -1;
  double best_d = kBoxMergeRadius;
  for (std::size_t i = 0; i < map.boxes3d.size(); ++i) {
    const double d = (Eigen::Vector2d(map.boxes3d[i].center.x(), map.boxes3d[i].center.y()) - xy)
                         .norm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    BoundingBox3D box;
    box.center = {xy.x(), xy.y(), kCarBoxHeight / 2.0};
    box.extents = {4.2, 1.9, kCarBoxHeight};
    box.yaw = 0.0;
    box.category = Category::IPCCandidate;
    box.state = BoxState::Candidate;
    box.id = static_cast<int>(map.boxes3d.size());
    map.boxes3d.push_back(box);
    bk.xy_sum.push_back({0, 0});
    bk.obs_count.push_back(0);
    bk.candidate_votes.push_back(0);
    bk.lpc_votes.push_back(0);
    bk.first_frame.push_back(frame);
    bk.last_frame.push_back(frame);
    best = box.id;
  }
  bk.xy_sum[best] += xy;
  bk.obs_count[best] += 1;
  bk.last_frame[best] = frame;
  map.boxes3d[best].center.x() = bk.xy_sum[best].x() / bk.obs_count[best];
  map.boxes3d[best].center.y() = bk.xy_sum[best].y() / bk.obs_count[best];
  return best;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(grace_period_s > 0.0)) throw DomainError("pipeline config: grace_period_s must be > 0");
  detect.validate();
  slam.validate();
}

WorldMap run_suspicion(const Sequence& seq, const PipelineConfig& cfg, PipelineTrace* trace) {
  cfg.validate();
  const int n = static_cast<int>(seq.frames.size());
  if (n < 3) throw TooSmall("run_suspicion: need at least 3 frames");

  SlamConfig scfg = cfg.slam;
  scfg.intrinsics = seq.scene.intrinsics;
  const CameraIntrinsics& k = scfg.intrinsics;
  Rng rng(hash_combine(cfg.seed, 0x5a5bec7ULL));

  WorldMap map;
  BoxBookkeeping bk;
  std::vector<Keypoint> prev_kps;
  std::vector<int> prev_links;  // keypoint -> map point, -1 unmapped
  Pose prev_pose;
  double flow_ms = 0, detect_ms = 0, feature_ms = 0, pose_ms = 0, mapping_ms = 0;

  // The final frame has no forward flow to classify against and is left out.
  for (int f = 0; f + 1 < n; ++f) {
    const FrameTruth& fr = seq.frames[f];
    try {
      FrameDetection det = detect_frame(fr, seq.frames[f + 1].image, cfg, rng, &flow_ms,
                                        &detect_ms);

      auto t0 = Clock::now();
      std::vector<Keypoint> kps = extract_keypoints(fr.image, det.boxes);
      CorrespondenceSet track;  // 2D-2D against the previous frame
      if (f > 0) track = match_keypoints(prev_kps, kps, scfg.ratio_test);
      feature_ms += ms_since(t0);

      t0 = Clock::now();
      Pose pose;
      std::vector<int> links(kps.size(), -1);
      if (f < 2) {
        // Surveyed takeoff: the first two frames fly on known poses and pin
        // the map's scale and frame.
        pose = fr.pose;
      } else {
        CorrespondenceSet corr;
        for (const auto& pr : track.pairs) {
          const int mp = prev_links[pr.first];
          if (mp >= 0) corr.add(pr.second, mp);
        }
        std::vector<ImagePoint> obs(kps.size());
        for (std::size_t i = 0; i < kps.size(); ++i) obs[i] = kps[i].position;
        std::vector<Point3> pts(map.map_points.size());
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = map.map_points[i].position;
        const PnpResult res = solve_pnp(corr, obs, pts, k, prev_pose, scfg);
        pose = res.pose;
        for (int i = 0; i < res.corr.size(); ++i)
          if (res.corr.inlier[i]) links[res.corr.pairs[i].first] = res.corr.pairs[i].second;
      }
      pose_ms += ms_since(t0);

      t0 = Clock::now();
      classify_with_pose(det, seq.scene.parking_spots, k, pose, cfg.detect);
      detect_ms += ms_since(t0);

      map.keyframes.push_back({f, pose, kps, det.boxes});

      t0 = Clock::now();
      // Re-observations of existing points.
      for (std::size_t i = 0; i < links.size(); ++i)
        if (links[i] >= 0) map.map_points[links[i]].observations.push_back({f, static_cast<int>(i)});

      // Fresh points from the previous frame's unmapped matches; elevated
      // ones gather per 2D box so each parked car contributes one sighting.
      if (f > 0) {
        std::vector<std::vector<int>> elevated_new(det.boxes.size());  // new map point ids
        std::vector<std::vector<Eigen::Vector2d>> elevated_xy(det.boxes.size());
        int ground_budget = kGroundCapPerFrame;
        for (const auto& pr : track.pairs) {
          const int ip = pr.first, ic = pr.second;
          if (prev_links[ip] >= 0 || links[ic] >= 0) continue;
          Point3 x;
          try {
            x = triangulate(prev_kps[ip].position, prev_pose, kps[ic].position, pose, k,
                            scfg.epsilon_inlier);
          } catch (const Error&) {
            continue;  // baseline/cheirality/reprojection rejects are routine
          }
          if (x.z() < -kCarPointMinZ) continue;  // below ground: bad geometry
          const int b2 = kps[ic].box_tag;
          const bool on_car = x.z() > kCarPointMinZ;
          if (on_car && (b2 < 0 || !parked(det.boxes[b2].category))) continue;
          if (!on_car && ground_budget <= 0) continue;

          MapPoint mp;
          mp.position = x;
          mp.descriptor = kps[ic].descriptor;
          mp.observations = {{f - 1, ip}, {f, ic}};
          const int mp_id = static_cast<int>(map.map_points.size());
          if (on_car) {
            elevated_new[b2].push_back(mp_id);
            elevated_xy[b2].push_back({x.x(), x.y()});
          } else {
            --ground_budget;
          }
          map.map_points.push_back(std::move(mp));
          links[ic] = mp_id;
        }

        // One 3D box sighting per parked 2D box with elevated support; roof
        // points straddle the footprint so their mean tracks its center.
        for (std::size_t b = 0; b < det.boxes.size(); ++b) {
          std::vector<Eigen::Vector2d> support = elevated_xy[b];
          for (std::size_t i = 0; i < links.size(); ++i) {
            const int mp = links[i];
            if (mp < 0 || kps[i].box_tag != static_cast<int>(b)) continue;
            const Point3& x = map.map_points[mp].position;
            if (x.z() > kCarPointMinZ &&
                std::find(elevated_new[b].begin(), elevated_new[b].end(), mp) ==
                    elevated_new[b].end())
              support.push_back({x.x(), x.y()});
          }
          if (support.empty() || !parked(det.boxes[b].category)) continue;
          Eigen::Vector2d xy{0, 0};
          for (const auto& p : support) xy += p;
          xy /= static_cast<double>(support.size());
          const int box_id = find_or_create_box(map, bk, xy, f);
          if (det.boxes[b].category == Category::IPCCandidate)
            bk.candidate_votes[box_id] += 1;
          else
            bk.lpc_votes[box_id] += 1;
          for (const int mp : elevated_new[b]) map.map_points[mp].box3d_tag = box_id;
        }
      }

      if (f >= 2 && f % kBaInterval == 0) {
        std::vector<int> window;
        for (int id = std::max(1, f - kBaWindow + 1); id <= f; ++id) window.push_back(id);
        map = local_bundle_adjust(map, window, scfg);
        pose = map.keyframes.back().pose;
      }
      mapping_ms += ms_since(t0);

      prev_kps = std::move(kps);
      prev_links = std::move(links);
      prev_pose = pose;
    } catch (const InsufficientBackground& e) {
      throw InsufficientBackground(frame_context("suspicion", f, e.what()));
    } catch (const Degenerate& e) {
      throw Degenerate(frame_context("suspicion", f, e.what()));
    } catch (const Diverged& e) {
      throw Diverged(frame_context("suspicion", f, e.what()));
    } catch (const EmptyMask& e) {
      throw EmptyMask(frame_context("suspicion", f, e.what()));
    }
  }

  // Straggler window so late keyframes get refined too.
  if (static_cast<int>(map.keyframes.size()) > 2 && (n - 2) % kBaInterval != 0) {
    const int last = map.keyframes.back().id;
    std::vector<int> window;
    for (int id = std::max(1, last - kBaWindow + 1); id <= last; ++id) window.push_back(id);
    map = local_bundle_adjust(map, window, scfg);
  }

  // A car's label is whatever most frames said it was: single-frame overlap
  // flukes (box jitter shaving a legally parked car under the spot threshold)
  // do not decide anything.
  for (auto& box : map.boxes3d)
    box.category = bk.candidate_votes[box.id] >= bk.lpc_votes[box.id] ? Category::IPCCandidate
                                                                      : Category::LPC;

  if (trace) {
    for (const auto& box : map.boxes3d)
      trace->suspicion_sightings.push_back({box.id, bk.first_frame[box.id], bk.last_frame[box.id]});
    trace->timings.push_back({"suspicion.flow", flow_ms});
    trace->timings.push_back({"suspicion.detect", detect_ms});
    trace->timings.push_back({"suspicion.features", feature_ms});
    trace->timings.push_back({"suspicion.pose", pose_ms});
    trace->timings.push_back({"suspicion.mapping", mapping_ms});
  }
  return map;
}

WorldMap run_investigation(const WorldMap& map, const Sequence& seq, const PipelineConfig& cfg,
                           PipelineTrace* trace) {
  cfg.validate();
  if (map.keyframes.empty() || map.map_points.empty())
    throw TooSmall("run_investigation: empty map");
  const int n = static_cast<int>(seq.frames.size());
  if (n < 2) throw TooSmall("run_investigation: need at least 2 frames");

  SlamConfig scfg = cfg.slam;
  scfg.intrinsics = seq.scene.intrinsics;
  const CameraIntrinsics& k = scfg.intrinsics;
  Rng rng(hash_combine(cfg.seed, 0x1d3e57ULL));

  std::vector<Point3> pts(map.map_points.size());
  std::vector<Descriptor> mp_desc(map.map_points.size());
  for (std::size_t i = 0; i < map.map_points.size(); ++i) {
    pts[i] = map.map_points[i].position;
    mp_desc[i] = map.map_points[i].descriptor;
  }

  std::vector<std::vector<std::pair<int, int>>> frame_associations(n - 1);
  std::vector<int> first_assoc(map.boxes3d.size(), -1), last_assoc(map.boxes3d.size(), -1);
  Pose prev_pose;
  double flow_ms = 0, detect_ms = 0, feature_ms = 0, reloc_ms = 0, pose_ms = 0, assoc_ms = 0;

  for (int f = 0; f + 1 < n; ++f) {
    const FrameTruth& fr = seq.frames[f];
    try {
      FrameDetection det = detect_frame(fr, seq.frames[f + 1].image, cfg, rng, &flow_ms,
                                        &detect_ms);

      auto t0 = Clock::now();
      std::vector<Keypoint> kps = extract_keypoints(fr.image, det.boxes);
      feature_ms += ms_since(t0);

      std::vector<ImagePoint> obs(kps.size());
      std::vector<Descriptor> kp_desc(kps.size());
      std::vector<char> kp_excluded(kps.size(), 0);
      for (std::size_t i = 0; i < kps.size(); ++i) {
        obs[i] = kps[i].position;
        kp_desc[i] = kps[i].descriptor;
        kp_excluded[i] = kps[i].excluded ? 1 : 0;
      }

      CorrespondenceSet corr;
      if (f == 0) {
        t0 = Clock::now();
        const RelocalizationResult rel = relocalize(kps, map, scfg);
        prev_pose = rel.pose;
        corr = rel.corr;
        reloc_ms += ms_since(t0);
      } else {
        t0 = Clock::now();
        corr = match_descriptors(kp_desc, mp_desc, scfg.ratio_test, &kp_excluded, nullptr);
        pose_ms += ms_since(t0);
      }

      t0 = Clock::now();
      PnpResult res = solve_pnp(corr, obs, pts, k, prev_pose, scfg);

      // Pose-guided recovery of matches the ratio test dropped.
      std::vector<char> kp_used(kps.size(), 0), mp_used(pts.size(), 0);
      for (const auto& pr : res.corr.pairs) {
        kp_used[pr.first] = 1;
        mp_used[pr.second] = 1;
      }
      CorrespondenceSet full = res.corr;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (mp_used[j]) continue;
        const Point3 xc = res.pose.apply(pts[j]);
        if (xc.z() <= 1e-9) continue;
        const ImagePoint uv{k.fx * xc.x() / xc.z() + k.cx, k.fy * xc.y() / xc.z() + k.cy};
        if (uv.x() < 0 || uv.x() > k.width - 1 || uv.y() < 0 || uv.y() > k.height - 1) continue;
        int best = -1;
        double best_d2 = kGuidedMaxDist2;
        for (std::size_t i = 0; i < kps.size(); ++i) {
          if (kp_used[i] || kp_excluded[i]) continue;
          if ((kps[i].position - uv).squaredNorm() > kGuidedRadius * kGuidedRadius) continue;
          const double d2 = (kp_desc[i] - mp_desc[j]).squaredNorm();
          if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(i);
          }
        }
        if (best >= 0) {
          full.add(best, static_cast<int>(j));
          kp_used[best] = 1;
        }
      }
      res = solve_pnp(full, obs, pts, k, res.pose, scfg);
      prev_pose = res.pose;
      pose_ms += ms_since(t0);

      t0 = Clock::now();
      classify_with_pose(det, seq.scene.parking_spots, k, res.pose, cfg.detect);
      detect_ms += ms_since(t0);

      t0 = Clock::now();
      std::vector<BoundingBox2D> parked_boxes;
      for (const auto& b : det.boxes)
        if (parked(b.category)) parked_boxes.push_back(b);
      frame_associations[f] = associate_boxes(res.corr, kps, map.map_points, parked_boxes,
                                              map.boxes3d, scfg.delta_obj);
      for (const auto& [box3d, box2d] : frame_associations[f]) {
        (void)box2d;
        if (first_assoc[box3d] < 0) first_assoc[box3d] = f;
        last_assoc[box3d] = f;
      }
      assoc_ms += ms_since(t0);
    } catch (const RelocalizationFailed& e) {
      throw RelocalizationFailed(frame_context("investigation", f, e.what()));
    } catch (const InsufficientBackground& e) {
      throw InsufficientBackground(frame_context("investigation", f, e.what()));
    } catch (const Degenerate& e) {
      throw Degenerate(frame_context("investigation", f, e.what()));
    } catch (const Diverged& e) {
      throw Diverged(frame_context("investigation", f, e.what()));
    }
  }

  WorldMap out = reidentify(map, frame_associations, scfg.n_confirm);

  if (trace) {
    trace->frame_associations = std::move(frame_associations);
    for (const auto& box : out.boxes3d)
      if (first_assoc[box.id] >= 0)
        trace->investigation_sightings.push_back({box.id, first_assoc[box.id],
                                                  last_assoc[box.id]});
    trace->timings.push_back({"investigation.flow", flow_ms});
    trace->timings.push_back({"investigation.detect", detect_ms});
    trace->timings.push_back({"investigation.features", feature_ms});
    trace->timings.push_back({"investigation.relocalize", reloc_ms});
    trace->timings.push_back({"investigation.pose", pose_ms});
    trace->timings.push_back({"investigation.associate", assoc_ms});
  }
  return out;
}

std::vector<Eigen::Vector2d> ground_truth_ipcs(const SceneModel& scene) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& car : scene.cars)
    if (car.category == Category::IPCCandidate && !car.departs)
      out.push_back(car.footprint_center);
  return out;
}

PvdScores evaluate_pvd(const PvdReport& report, const std::vector<Eigen::Vector2d>& gt_ipcs) {
  struct Cand {
    double d;
    int pred, gt;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < report.confirmed.size(); ++i) {
    const Eigen::Vector2d xy{report.confirmed[i].box.center.x(),
                             report.confirmed[i].box.center.y()};
    for (std::size_t j = 0; j < gt_ipcs.size(); ++j) {
      const double d = (xy - gt_ipcs[j]).norm();
      if (d <= kTpRadius) cands.push_back({d, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  std::vector<char> pred_used(report.confirmed.size(), 0), gt_used(gt_ipcs.size(), 0);
  int tp = 0;
  for (const auto& c : cands) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = 1;
    gt_used[c.gt] = 1;
    ++tp;
  }
  PvdScores s;
  s.precision = report.confirmed.empty() ? 1.0 : static_cast<double>(tp) / report.confirmed.size();
  s.recall = gt_ipcs.empty() ? 1.0 : static_cast<double>(tp) / gt_ipcs.size();
  s.f1 = (s.precision + s.recall > 0.0)
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

PvdReport build_report(const WorldMap& final_map, const PipelineTrace& trace) {
  PvdReport report;
  for (const auto& box : final_map.boxes3d) {
    if (box.state != BoxState::ConfirmedIPC) continue;
    ConfirmedIpc c;
    c.box = box;
    for (const auto& s : trace.suspicion_sightings)
      if (s.box_id == box.id) c.first_seen_frame = s.first_frame;
    for (const auto& s : trace.investigation_sightings)
      if (s.box_id == box.id) c.last_seen_frame = s.last_frame;
    report.confirmed.push_back(c);
  }
  report.timings = trace.timings;
  return report;
}

ScenarioRun run_scenario(const SceneModel& scene, const PipelineConfig& cfg) {
  ScenarioRun out;
  PipelineTrace trace;

  auto t0 = Clock::now();
  const Sequence pass1 = render_sequence(scene, false);
  const SceneModel revisit = investigation_view(scene, hash_combine(cfg.seed, 0x9e7a11ULL));
  const Sequence pass2 = render_sequence(revisit, false);
  const double render_ms = ms_since(t0);

  out.suspicion_map = run_suspicion(pass1, cfg, &trace);
  try {
    out.final_map = run_investigation(out.suspicion_map, pass2, cfg, &trace);
  } catch (const RelocalizationFailed&) {
    out.relocalization_failed = true;
    out.final_map = out.suspicion_map;
  }

  out.report = build_report(out.final_map, trace);
  const PvdScores s = evaluate_pvd(out.report, ground_truth_ipcs(scene));
  out.report.precision = s.precision;
  out.report.recall = s.recall;
  out.report.f1 = s.f1;
  out.report.timings.insert(out.report.timings.begin(), {"render", render_ms});
  out.report.timings.push_back({"total", ms_since(t0)});
  return out;
}

Json pipeline_config_to_json(const PipelineConfig& cfg) {
  return Json{
      {"grace_period_s", cfg.grace_period_s},
      {"seed", cfg.seed},
      {"flow",
       {{"levels", cfg.flow.levels},
        {"max_disp", cfg.flow.max_disp},
        {"patch_radius", cfg.flow.patch_radius},
        {"use_offset_sampling", cfg.flow.use_offset_sampling},
        {"median_filter", cfg.flow.median_filter},
        {"min_confidence", cfg.flow.min_confidence},
        {"lambda_photo", cfg.flow.lambda_photo},
        {"lambda_smooth", cfg.flow.lambda_smooth},
        {"lambda_self_max", cfg.flow.lambda_self_max}}},
      {"detect",
       {{"tau_mc", cfg.detect.tau_mc},
        {"tau_spot", cfg.detect.tau_spot},
        {"gamma", cfg.detect.gamma},
        {"alpha", cfg.detect.alpha},
        {"proposal_mode",
         cfg.detect.proposal_mode == ProposalMode::OracleJitter ? "oracle_jitter" : "blob"},
        {"jitter_frac", cfg.detect.jitter_frac}}},
      {"slam",
       {{"delta_obj", cfg.slam.delta_obj},
        {"epsilon_inlier", cfg.slam.epsilon_inlier},
        {"huber_delta", cfg.slam.huber_delta},
        {"max_gn_iters", cfg.slam.max_gn_iters},
        {"ratio_test", cfg.slam.ratio_test},
        {"n_confirm", cfg.slam.n_confirm}}},
  };
}

PipelineConfig pipeline_config_from_json(const Json& j) {
  PipelineConfig cfg;
  cfg.grace_period_s = j.value("grace_period_s", cfg.grace_period_s);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("flow")) {
    const Json& f = j.at("flow");
    cfg.flow.levels = f.value("levels", cfg.flow.levels);
    cfg.flow.max_disp = f.value("max_disp", cfg.flow.max_disp);
    cfg.flow.patch_radius = f.value("patch_radius", cfg.flow.patch_radius);
    cfg.flow.use_offset_sampling = f.value("use_offset_sampling", cfg.flow.use_offset_sampling);
    cfg.flow.median_filter = f.value("median_filter", cfg.flow.median_filter);
    cfg.flow.min_confidence = f.value("min_confidence", cfg.flow.min_confidence);
    cfg.flow.lambda_photo = f.value("lambda_photo", cfg.flow.lambda_photo);
    cfg.flow.lambda_smooth = f.value("lambda_smooth", cfg.flow.lambda_smooth);
    cfg.flow.lambda_self_max = f.value("lambda_self_max", cfg.flow.lambda_self_max);
  }
  if (j.contains("detect")) {
    const Json& d = j.at("detect");
    cfg.detect.tau_mc = d.value("tau_mc", cfg.detect.tau_mc);
    cfg.detect.tau_spot = d.value("tau_spot", cfg.detect.tau_spot);
    cfg.detect.gamma = d.value("gamma", cfg.detect.gamma);
    cfg.detect.alpha = d.value("alpha", cfg.detect.alpha);
    const std::string mode = d.value("proposal_mode", std::string("oracle_jitter"));
    if (mode == "oracle_jitter")
      cfg.detect.proposal_mode = ProposalMode::OracleJitter;
    else if (mode == "blob")
      cfg.detect.proposal_mode = ProposalMode::Blob;
    else
      throw DomainError("pipeline config: unknown proposal_mode '" + mode + "'");
    cfg.detect.jitter_frac = d.value("jitter_frac", cfg.detect.jitter_frac);
  }
  if (j.contains("slam")) {
    const Json& s = j.at("slam");
    cfg.slam.delta_obj = s.value("delta_obj", cfg.slam.delta_obj);
    cfg.slam.epsilon_inlier = s.value("epsilon_inlier", cfg.slam.epsilon_inlier);
    cfg.slam.huber_delta = s.value("huber_delta", cfg.slam.huber_delta);
    cfg.slam.max_gn_iters = s.value("max_gn_iters", cfg.slam.max_gn_iters);
    cfg.slam.ratio_test = s.value("ratio_test", cfg.slam.ratio_test);
    cfg.slam.n_confirm = s.value("n_confirm", cfg.slam.n_confirm);
  }
  cfg.validate();
  return cfg;
}

Json report_to_json(const PvdReport& report) {
  Json confirmed = Json::array();
  for (const auto& c : report.confirmed) {
    Json e = to_json(c.box);
    e["first_seen_frame"] = c.first_seen_frame;
    e["last_seen_frame"] = c.last_seen_frame;
    confirmed.push_back(e);
  }
  return Json{{"confirmed_ipcs", confirmed},
              {"precision", report.precision},
              {"recall", report.recall},
              {"f1", report.f1}};
}

Json timings_to_json(const PvdReport& report) {
  Json t = Json::array();
  for (const auto& s : report.timings) t.push_back({{"stage", s.stage}, {"millis", s.millis}});
  return Json{{"timings", t}};
}

}  // namespace pvd
