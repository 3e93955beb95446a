#pragma once

#include "pvd/flow/field.hpp"

namespace pvd {

// KITTI-style flow error summary. A pixel counts as an outlier when its
// endpoint error exceeds 3 px AND 5% of the ground-truth magnitude. f1_all is
// the outlier fraction over `valid` pixels; out_noc restricts additionally to
// non-occluded ground truth (gt.valid).
struct FlowMetrics {
  double epe_mean = 0.0;
  double f1_all = 0.0;   // fraction in [0,1]
  double out_noc = 0.0;  // fraction in [0,1]
};

FlowMetrics flow_metrics(const FlowField& flow, const FlowField& gt, const Mask& valid);

}  // namespace pvd
