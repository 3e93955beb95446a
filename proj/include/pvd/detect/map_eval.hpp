#pragma once

#include <string>
#include <vector>

#include "pvd/core/types.hpp"

namespace pvd {

// One detection or ground-truth box, tied to the frame it was seen in.
// Matching never crosses frames.
struct Detection {
  int frame = 0;
  BoundingBox2D box;
};

struct MapEvaluation {
  double map = 0.0;
  // One entry per category present in the ground truth, mean AP over the ten
  // IoU thresholds.
  std::vector<std::pair<Category, double>> per_class;
};

// COCO-style protocol: per category and per IoU threshold 0.50:0.05:0.95,
// detections are matched greedily in score order (each ground truth at most
// once), AP is the area under the interpolated precision envelope, and the
// final number averages over thresholds and over categories that appear in
// the ground truth. IPC boxes count as IPC candidates on both sides.
MapEvaluation evaluate_map(const std::vector<Detection>& detections,
                           const std::vector<Detection>& ground_truth);

// JSON lines, one per detection: {"frame":..,"box":[x_min,y_min,x_max,y_max],
// "category":..,"score":..}.
void write_detections_jsonl(const std::string& path, const std::vector<Detection>& detections);
std::vector<Detection> read_detections_jsonl(const std::string& path);

}  // namespace pvd
