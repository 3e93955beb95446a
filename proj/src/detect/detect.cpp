#include "pvd/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pvd/core/errors.hpp"
#include "pvd/core/geometry.hpp"

namespace pvd {

void DetectConfig::validate() const {
  if (!(tau_mc > 0.0)) throw DomainError("DetectConfig: tau_mc must be positive");
  if (!(tau_spot > 0.0 && tau_spot <= 1.0)) throw DomainError("DetectConfig: tau_spot outside (0,1]");
  if (!(gamma >= 0.0)) throw DomainError("DetectConfig: gamma must be non-negative");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("DetectConfig: alpha outside (0,1]");
  if (!(jitter_frac >= 0.0 && jitter_frac < 0.5)) {
    throw DomainError("DetectConfig: jitter_frac outside [0,0.5)");
  }
}

namespace {

constexpr double kPi = 3.141592653589793;

std::vector<BoundingBox2D> oracle_proposals(const FrameTruth& frame, const DetectConfig& cfg,
                                            Rng& rng) {
  std::vector<BoundingBox2D> out;
  out.reserve(frame.boxes.size());
  for (const BoundingBox2D& gt : frame.boxes) {
    // Translation drawn uniformly from a disk of relative radius jitter_frac:
    // bounding the joint displacement (rather than each axis independently)
    // keeps worst-case IoU against the source box above 0.7 at the default
    // 10% level.
    const double angle = rng.uniform(0.0, 2.0 * kPi);
    const double radius = cfg.jitter_frac * std::sqrt(rng.uniform());
    const double dx = radius * std::cos(angle) * gt.width();
    const double dy = radius * std::sin(angle) * gt.height();
    BoundingBox2D b = gt;
    b.x_min += dx;
    b.x_max += dx;
    b.y_min += dy;
    b.y_max += dy;
    b.category = Category::IPCCandidate;  // proposals carry no class yet
    b.score = 1.0 - radius;
    out.push_back(b);
  }
  return out;
}

// Connected components of high-gradient pixels. Car outlines are step edges
// an order of magnitude above the ground-texture gradient, so a fixed
// threshold plus a small dilation closes each outline into one component.
std::vector<BoundingBox2D> blob_proposals(const Grid& image) {
  constexpr float kGradThresh = 0.08f;
  constexpr int kDilate = 2;
  constexpr int kMinArea = 200;        // px^2 of the component bounding box
  constexpr double kMaxFrameFrac = 0.25;

  const int w = image.width, h = image.height;
  const Grid gx = gradient_x(image), gy = gradient_y(image);
  Mask hot(w, h, 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (std::abs(gx.at(u, v)) + std::abs(gy.at(u, v)) > kGradThresh) hot.at(u, v) = 1;

  Mask grown(w, h, 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      bool any = false;
      for (int dy = -kDilate; dy <= kDilate && !any; ++dy)
        for (int dx = -kDilate; dx <= kDilate && !any; ++dx) {
          const int x = u + dx, y = v + dy;
          if (x >= 0 && x < w && y >= 0 && y < h && hot.at(x, y)) any = true;
        }
      grown.at(u, v) = any ? 1 : 0;
    }

  // Scan-order flood fill keeps component ids (and thus output order)
  // deterministic.
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<BoundingBox2D> out;
  std::vector<std::pair<int, int>> stack;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!grown.at(u, v) || label[static_cast<std::size_t>(v) * w + u] >= 0) continue;
      const int id = static_cast<int>(out.size());
      int x_min = u, x_max = u, y_min = v, y_max = v;
      long area = 0;
      stack.assign(1, {u, v});
      label[static_cast<std::size_t>(v) * w + u] = id;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++area;
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
        constexpr int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx4[k], ny = y + dy4[k];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
          if (!grown.at(nx, ny) || label[idx] >= 0) continue;
          label[idx] = id;
          stack.push_back({nx, ny});
        }
      }
      BoundingBox2D b;
      b.x_min = x_min;
      b.y_min = y_min;
      b.x_max = x_max;
      b.y_max = y_max;
      b.category = Category::IPCCandidate;
      // Denser components are less likely to be stray texture.
      b.score = std::min(1.0, double(area) / std::max(1.0, b.area()));
      if (b.area() >= kMinArea && b.area() <= kMaxFrameFrac * w * h) out.push_back(b);
    }
  }
  return out;
}

}  // namespace

std::vector<BoundingBox2D> propose_boxes(const FrameTruth& frame, const DetectConfig& cfg,
                                         Rng& rng) {
  cfg.validate();
  if (cfg.proposal_mode == ProposalMode::OracleJitter) return oracle_proposals(frame, cfg, rng);
  return blob_proposals(frame.image);
}

namespace {

// Index (n-1)/2 in sorted order: deterministic, and for even counts the lower
// middle rather than an averaged value.
double median_of(std::vector<float>& v) {
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

}  // namespace

Eigen::Vector2d ego_flow_estimate(const FlowField& flow,
                                  const std::vector<BoundingBox2D>& exclude) {
  const int w = flow.width(), h = flow.height();
  std::vector<float> us, vs;
  us.reserve(static_cast<std::size_t>(w) * h);
  vs.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!flow.valid.at(x, y)) continue;
      const ImagePoint p{double(x), double(y)};
      bool inside = false;
      for (const BoundingBox2D& b : exclude)
        if (b.contains(p)) {
          inside = true;
          break;
        }
      if (inside) continue;
      us.push_back(flow.du.at(x, y));
      vs.push_back(flow.dv.at(x, y));
    }
  if (us.size() < static_cast<std::size_t>(w) * h / 10)
    throw InsufficientBackground("ego_flow_estimate: boxes cover too much of the frame");
  return {median_of(us), median_of(vs)};
}

FlowStats flow_stats(const FlowField& flow, const BoundingBox2D& box, const Eigen::Vector2d& ego) {
  const int x0 = std::max(0, int(std::ceil(box.x_min)));
  const int x1 = std::min(flow.width() - 1, int(std::floor(box.x_max)));
  const int y0 = std::max(0, int(std::ceil(box.y_min)));
  const int y1 = std::min(flow.height() - 1, int(std::floor(box.y_max)));

  std::vector<float> us, vs, mags;
  long total = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      ++total;
      if (!flow.valid.at(x, y)) continue;
      const float u = flow.du.at(x, y), v = flow.dv.at(x, y);
      us.push_back(u);
      vs.push_back(v);
      mags.push_back(std::hypot(u, v));
    }
  if (mags.empty()) throw EmptyBox("flow_stats: no valid flow pixel in box");

  FlowStats s;
  double sum = 0.0, sum2 = 0.0;
  for (float m : mags) {
    sum += m;
    sum2 += double(m) * m;
  }
  s.mean_mag = sum / mags.size();
  s.std_mag = std::sqrt(std::max(0.0, sum2 / mags.size() - s.mean_mag * s.mean_mag));
  s.median_mag = median_of(mags);
  const Eigen::Vector2d med{median_of(us), median_of(vs)};
  s.residual_mag = (med - ego).norm();
  s.coverage = total > 0 ? double(mags.size()) / total : 0.0;
  return s;
}

double footprint_overlap(const BoundingBox2D& box, const std::vector<Polygon2>& spots,
                         const CameraIntrinsics& intrinsics, const Pose& pose) {
  const ImagePoint corners[4] = {{box.x_min, box.y_min},
                                 {box.x_max, box.y_min},
                                 {box.x_max, box.y_max},
                                 {box.x_min, box.y_max}};
  Polygon2 footprint;
  footprint.reserve(4);
  for (const ImagePoint& c : corners) {
    const auto hit = intersect_horizontal_plane(pixel_ray(pose, intrinsics, c), 0.0);
    if (!hit) return 0.0;  // corner ray misses the ground: no usable footprint
    footprint.push_back(hit->head<2>());
  }
  if (polygon_area(footprint) < 0.0) std::reverse(footprint.begin(), footprint.end());
  return overlap_fraction(footprint, spots);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Overlap margins live in [-1,1]; stretch them so a comfortable pass or fail
// saturates like a multi-pixel flow residual does.
constexpr double kOverlapMarginScale = 10.0;

}  // namespace

Classification classify_box(const BoundingBox2D& box, const FlowStats& stats,
                            const std::vector<Polygon2>& spots,
                            const CameraIntrinsics& intrinsics, const Pose& pose,
                            const DetectConfig& cfg) {
  Classification out;
  const double residual_margin = stats.residual_mag - cfg.tau_mc;
  if (residual_margin > 0.0) {
    out.category = Category::MC;
    out.score = sigmoid(residual_margin);
    return out;
  }
  const double overlap = footprint_overlap(box, spots, intrinsics, pose);
  const double overlap_margin = kOverlapMarginScale * (overlap - cfg.tau_spot);
  if (overlap >= cfg.tau_spot) {
    out.category = Category::LPC;
    out.score = sigmoid(overlap_margin);
  } else {
    out.category = Category::IPCCandidate;
    out.score = sigmoid(-overlap_margin);
  }
  return out;
}

double focal_loss(double p, double gamma, double alpha) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("focal_loss: p outside (0,1]");
  return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
}

}  // namespace pvd
