#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvd/detect/detect.hpp"
#include "pvd/flow/estimator.hpp"
#include "pvd/sim/sequence.hpp"
#include "pvd/slam/map.hpp"

namespace pvd {

struct PipelineConfig {
  // Modeled revisit delay between the two passes. The simulator realizes it
  // as a separately generated flight over the same world, so the value only
  // parameterizes reports, but it must still be a sensible duration.
  double grace_period_s = 300.0;
  FlowConfig flow;
  DetectConfig detect;
  SlamConfig slam;
  std::uint64_t seed = 0;

  // Throws DomainError on violated invariants.
  void validate() const;
};

// Field names mirror the struct so a config file reads like the defaults.
// Camera intrinsics are injected from the scene at run time and never appear
// in the file.
Json pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const Json& j);

// One confirmed violation: where the car sits and when it was seen.
// first_seen_frame indexes the suspicion pass, last_seen_frame the
// investigation pass.
struct ConfirmedIpc {
  BoundingBox3D box;
  int first_seen_frame = -1;
  int last_seen_frame = -1;
};

struct StageTiming {
  std::string stage;
  double millis = 0.0;
};

struct PvdReport {
  std::vector<ConfirmedIpc> confirmed;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  // 2pr/(p+r) when p+r > 0, else 0
  std::vector<StageTiming> timings;
};

// Canonical report document. Timings vary run to run, so they are excluded
// here and serialized separately: a report under a fixed config and seed is
// byte-identical across runs.
Json report_to_json(const PvdReport& report);
Json timings_to_json(const PvdReport& report);

// When a 3D box was sighted; run_suspicion fills spans over its pass,
// run_investigation over its own.
struct BoxSighting {
  int box_id = -1;
  int first_frame = -1;
  int last_frame = -1;
};

// Optional side channel for everything the maps themselves do not carry.
struct PipelineTrace {
  std::vector<BoxSighting> suspicion_sightings;
  std::vector<BoxSighting> investigation_sightings;
  // Per investigation frame: (3D box id, 2D box index) association pairs.
  std::vector<std::vector<std::pair<int, int>>> frame_associations;
  std::vector<StageTiming> timings;
};

// First pass: per frame, estimate flow to the next frame, propose and
// classify boxes, extract keypoints (moving-car features excluded), solve the
// camera pose, triangulate fresh map points and periodically bundle-adjust.
// Parked cars become 3D boxes; off-spot ones are the Candidates. The first
// two frames fly on their surveyed poses and anchor the map's metric frame.
// Stage errors are rethrown with the frame index prepended.
WorldMap run_suspicion(const Sequence& seq, const PipelineConfig& cfg,
                       PipelineTrace* trace = nullptr);

// Second pass over the revisit flight: relocalize against the map, track the
// camera per frame, associate candidate boxes with detected vehicles, and
// confirm candidates re-identified in enough distinct frames. Keyframes and
// map points pass through unchanged; only box states are updated.
// Throws RelocalizationFailed when the drone cannot find itself in the map.
WorldMap run_investigation(const WorldMap& map, const Sequence& seq, const PipelineConfig& cfg,
                           PipelineTrace* trace = nullptr);

struct PvdScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Ground-plane centers of the cars that are actually in violation: candidates
// that did not depart before the investigation pass.
std::vector<Eigen::Vector2d> ground_truth_ipcs(const SceneModel& scene);

// A confirmed box is a true positive iff its center lies within 1.5 m
// (ground-plane distance) of an unclaimed ground-truth center; pairs are
// claimed greedily by increasing distance. No confirmations means precision
// 1 by convention (nothing claimed, nothing wrong), no ground truth means
// recall 1.
PvdScores evaluate_pvd(const PvdReport& report, const std::vector<Eigen::Vector2d>& gt_ipcs);

// Assemble the confirmed-IPC list (boxes in ConfirmedIPC state plus their
// sighting spans) from a finished investigation. Scores are left at zero for
// evaluate_pvd to fill.
PvdReport build_report(const WorldMap& final_map, const PipelineTrace& trace);

// Both passes plus scoring on one scene: render the suspicion flight, map it,
// render the investigation revisit, confirm, and evaluate against ground
// truth. A relocalization failure is recorded instead of thrown; the report
// is then the partial one (nothing confirmed).
struct ScenarioRun {
  WorldMap suspicion_map;
  WorldMap final_map;
  PvdReport report;
  bool relocalization_failed = false;
};

ScenarioRun run_scenario(const SceneModel& scene, const PipelineConfig& cfg);

}  // namespace pvd
