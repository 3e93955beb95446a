#pragma once

#include <vector>

#include "pvd/core/polygon.hpp"
#include "pvd/core/rng.hpp"
#include "pvd/core/types.hpp"
#include "pvd/flow/field.hpp"
#include "pvd/sim/render.hpp"

namespace pvd {

// Flow statistics over the valid pixels of one box. residual_mag is the
// length of (componentwise median in-box flow - ego flow): parked cars ride
// the camera motion, movers do not.
struct FlowStats {
  double mean_mag = 0.0;
  double median_mag = 0.0;
  double std_mag = 0.0;
  double residual_mag = 0.0;
  double coverage = 0.0;  // valid fraction of the box raster
};

enum class ProposalMode { OracleJitter, Blob };

struct DetectConfig {
  double tau_mc = 3.0;    // px of ego-residual above which a box is moving
  double tau_spot = 0.7;  // ground-footprint overlap fraction for legal parking
  double gamma = 2.0;     // focal-loss focusing exponent
  double alpha = 0.25;    // focal-loss class balance
  ProposalMode proposal_mode = ProposalMode::OracleJitter;
  double jitter_frac = 0.1;  // oracle proposal jitter, relative to box size

  // Throws DomainError on violated invariants.
  void validate() const;
};

// Box proposals for one frame. Oracle mode translates each ground-truth box
// by a random sub-10% jitter (score = 1 - realized jitter); blob mode finds
// connected high-gradient regions in the image and is fully truth-free.
std::vector<BoundingBox2D> propose_boxes(const FrameTruth& frame, const DetectConfig& cfg,
                                         Rng& rng);

// Componentwise median flow over pixels outside every exclude box; the
// global-motion baseline the classifier subtracts. Throws
// InsufficientBackground when less than 10% of the frame survives exclusion.
Eigen::Vector2d ego_flow_estimate(const FlowField& flow,
                                  const std::vector<BoundingBox2D>& exclude);

// Throws EmptyBox when no valid flow pixel falls inside the box.
FlowStats flow_stats(const FlowField& flow, const BoundingBox2D& box,
                     const Eigen::Vector2d& ego);

// Fraction of the box's ground footprint covered by parking spots. The
// footprint is the box's four corners unprojected onto the ground plane, so
// partially-overhanging cars score partial overlap regardless of image scale.
double footprint_overlap(const BoundingBox2D& box, const std::vector<Polygon2>& spots,
                         const CameraIntrinsics& intrinsics, const Pose& pose);

struct Classification {
  Category category = Category::IPCCandidate;
  double score = 0.0;  // sigmoid of the signed margin at the deciding threshold
};

// MC when the ego-residual exceeds tau_mc; otherwise LPC when the ground
// footprint overlaps a parking spot by at least tau_spot, else IPC candidate.
Classification classify_box(const BoundingBox2D& box, const FlowStats& stats,
                            const std::vector<Polygon2>& spots,
                            const CameraIntrinsics& intrinsics, const Pose& pose,
                            const DetectConfig& cfg);

// -alpha * (1-p)^gamma * ln p. Throws DomainError unless p in (0,1].
double focal_loss(double p, double gamma, double alpha);

}  // namespace pvd
