#pragma once

#include <vector>

#include "pvd/flow/field.hpp"
#include "pvd/flow/pyramid.hpp"

namespace pvd {

struct FlowConfig {
  int levels = 5;
  int max_disp = 4;      // per-level search radius (pixels)
  int patch_radius = 2;  // correlation patch half-width
  bool use_offset_sampling = true;
  bool median_filter = true;      // 3x3 per-level cleanup
  double min_confidence = 0.05;   // below this the level keeps its prior flow
  double lambda_photo = 1.0;
  double lambda_smooth = 2.0;
  double lambda_self_max = 0.3;
};

// A grid plus the validity of each sample (warps can land out of bounds).
struct MaskedGrid {
  Grid values;
  Mask valid;

  MaskedGrid() = default;
  MaskedGrid(int w, int h) : values(w, h, 0.f), valid(w, h, 1) {}
};

// Backward warp: output(u) = bilinear(features, u + flow(u)).
MaskedGrid warp(const Grid& features, const FlowField& flow);

// Like warp but samples at u + flow(u) + offsets(u). With zero offsets this is
// exactly warp.
MaskedGrid offset_warp(const Grid& features, const FlowField& flow, const Grid& offset_u,
                       const Grid& offset_v);

// Per-pixel sampling correction from a least-squares affine (Jacobian) fit of
// the flow over a (2r+1)^2 window: offsets(u) = fit(u) - flow(u). Exactly zero
// wherever the flow is locally affine, so matching patches follow the local
// motion model instead of per-pixel flow noise near occlusions.
void default_offsets(const FlowField& flow, int window_radius, Grid& offset_u, Grid& offset_v);

// Dense matching costs over (2d+1)^2 integer displacements, stored per
// displacement plane. Costs are zero-mean normalized patch correlations in
// [-1, 1]; samples without bilinear support are excluded from normalization.
struct CostVolume {
  int width = 0, height = 0, max_disp = 0;
  std::vector<Grid> planes;  // indexed [ (dy+d)*(2d+1) + (dx+d) ]

  const Grid& plane(int dx, int dy) const {
    return planes[static_cast<std::size_t>(dy + max_disp) * (2 * max_disp + 1) + (dx + max_disp)];
  }
  Grid& plane(int dx, int dy) {
    return planes[static_cast<std::size_t>(dy + max_disp) * (2 * max_disp + 1) + (dx + max_disp)];
  }
};

CostVolume correlation_volume(const Grid& f1, const MaskedGrid& f2, int max_disp, int patch_radius);

// Argmax displacement with 1D quadratic subpixel refinement per axis (clamped
// to +-0.5). confidence = peak cost minus mean cost; 0 on flat volumes.
struct ResidualEstimate {
  FlowField flow;
  Grid confidence;
};

ResidualEstimate estimate_residual(const CostVolume& volume);

// Instrumentation for structural checks: which configuration each level used
// and which coarser level its prior flow came from (-1 at the coarsest level).
struct FlowTrace {
  struct LevelRecord {
    int level = 0;
    int coarser_level_read = -1;
    const FlowConfig* config = nullptr;
  };
  std::vector<LevelRecord> records;
};

// Coarse-to-fine estimation: per level upsample (x2), offset-warp the target
// features, correlate, refine, sum. Deterministic; single-threaded.
FlowField estimate_flow(const Grid& image1, const Grid& image2, const FlowConfig& cfg,
                        FlowTrace* trace = nullptr);

// Nearest upsampling helper used between levels: values scaled by 2, coords
// mapped so fine pixel x_f reads coarse (x_f - 0.5) / 2. Exposed for tests.
FlowField upsample_flow(const FlowField& coarse, int fine_width, int fine_height);

// 3x3 median of du/dv (borders use the in-bounds neighbourhood).
FlowField median_filter3(const FlowField& flow);

}  // namespace pvd
