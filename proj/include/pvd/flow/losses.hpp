#pragma once

#include "pvd/flow/estimator.hpp"
#include "pvd/flow/field.hpp"

namespace pvd {

// Charbonnier penalty (x2 + eps^2)^q on a squared residual.
constexpr double kCharbonnierEps = 1e-3;
constexpr double kCharbonnierQ = 0.45;
double charbonnier(double squared_residual);

// Forward-backward consistency: a pixel is occluded when the round trip
// |F_fw(u) + F_bw(u + F_fw(u))|^2 exceeds alpha1 * (|F_fw|^2 + |F_bw|^2) +
// alpha2, or when u + F_fw(u) leaves the image. Returns 1 = occluded.
Mask occlusion_mask(const FlowField& forward, const FlowField& backward, double alpha1 = 0.01,
                    double alpha2 = 0.5);

// Mean Charbonnier intensity residual over pixels where include != 0 and the
// warped sample is in bounds. Throws EmptyMask when nothing contributes.
double photometric_loss(const Grid& image1, const Grid& image2, const FlowField& flow,
                        const Mask& include);

// Edge-aware first-order smoothness: |flow gradients| weighted by
// exp(-beta |image gradient|) per axis, averaged over all pixels.
double smoothness_loss(const FlowField& flow, const Grid& image, double beta = 10.0);

// Mean Charbonnier distance between two flow fields over the mask.
double self_supervision_loss(const FlowField& student, const FlowField& teacher, const Mask& include);

struct LossWeights {
  double photo = 1.0;
  double smooth = 2.0;
  double self = 0.0;
};

// Fixed photometric/smoothness weights; self weight ramps from 0 to
// lambda_self_max over progress (0.5, 0.6], then stays flat.
LossWeights lambda_schedule(double progress, const FlowConfig& cfg);

double total_loss(double photo, double smooth, double self, const LossWeights& w);

}  // namespace pvd
