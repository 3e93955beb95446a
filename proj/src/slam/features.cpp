#include "pvd/slam/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pvd {

namespace {

constexpr double kHarrisK = 0.04;
constexpr int kHarrisWindow = 2;       // box radius of the structure tensor
constexpr float kHarrisThresh = 1e-6f;
constexpr int kPatchReach = 4;         // descriptor samples span +-3.5 px
constexpr int kMaxKeypoints = 1200;

}  // namespace

std::vector<Keypoint> extract_keypoints(const Grid& image,
                                        const std::vector<BoundingBox2D>& boxes) {
  const int w = image.width, h = image.height;
  const Grid gx = gradient_x(image), gy = gradient_y(image);
  Grid xx(w, h), xy(w, h), yy(w, h);
  for (std::size_t i = 0; i < xx.data.size(); ++i) {
    xx.data[i] = gx.data[i] * gx.data[i];
    xy.data[i] = gx.data[i] * gy.data[i];
    yy.data[i] = gy.data[i] * gy.data[i];
  }
  const Grid sxx = box_sum(xx, kHarrisWindow);
  const Grid sxy = box_sum(xy, kHarrisWindow);
  const Grid syy = box_sum(yy, kHarrisWindow);

  Grid response(w, h, 0.f);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const double a = sxx.at(u, v), b = sxy.at(u, v), c = syy.at(u, v);
      const double det = a * c - b * b, tr = a + c;
      response.at(u, v) = static_cast<float>(det - kHarrisK * tr * tr);
    }

  // Local maxima with a scan-order tie-break: strictly greater than later
  // pixels, at least as great as earlier ones, so plateaus yield exactly one
  // corner deterministically.
  std::vector<Keypoint> cands;
  for (int v = kPatchReach; v < h - kPatchReach; ++v) {
    for (int u = kPatchReach; u < w - kPatchReach; ++u) {
      const float r = response.at(u, v);
      if (r <= kHarrisThresh) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1 && is_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const float q = response.at(u + dx, v + dy);
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (earlier ? q >= r : q > r) is_max = false;
        }
      if (!is_max) continue;
      // Quadratic subpixel refinement along each axis; the vertex of the
      // parabola through the three response samples, clamped to the cell.
      double dx = 0.0, dy = 0.0;
      const double denx = response.at(u - 1, v) + response.at(u + 1, v) - 2.0 * r;
      if (denx < -1e-12)
        dx = std::clamp((response.at(u - 1, v) - response.at(u + 1, v)) / (2.0 * denx), -0.5, 0.5);
      const double deny = response.at(u, v - 1) + response.at(u, v + 1) - 2.0 * r;
      if (deny < -1e-12)
        dy = std::clamp((response.at(u, v - 1) - response.at(u, v + 1)) / (2.0 * deny), -0.5, 0.5);
      Keypoint kp;
      kp.position = {u + dx, v + dy};
      kp.response = r;
      cands.push_back(kp);
    }
  }

  std::stable_sort(cands.begin(), cands.end(),
                   [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  if (static_cast<int>(cands.size()) > kMaxKeypoints) cands.resize(kMaxKeypoints);

  std::vector<Keypoint> out;
  out.reserve(cands.size());
  for (Keypoint& kp : cands) {
    // 8x8 patch on a unit-spaced lattice centred between pixels.
    Descriptor d;
    int n = 0;
    for (int py = 0; py < 8; ++py)
      for (int px = 0; px < 8; ++px)
        d[n++] = bilinear(image, kp.position.x() + px - 3.5, kp.position.y() + py - 3.5);
    const float mean = d.mean();
    d.array() -= mean;
    const float norm = d.norm();
    if (norm < 1e-6f) continue;  // flat patch cannot be normalized
    kp.descriptor = d / norm;

    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
      if (!boxes[bi].contains(kp.position)) continue;
      if (kp.box_tag < 0) kp.box_tag = static_cast<int>(bi);
      if (boxes[bi].category == Category::MC) kp.excluded = true;
    }
    out.push_back(kp);
  }
  return out;
}

CorrespondenceSet match_descriptors(const std::vector<Descriptor>& a,
                                    const std::vector<Descriptor>& b, double ratio_test,
                                    const std::vector<char>* excluded_a,
                                    const std::vector<char>* excluded_b) {
  const auto skip = [](const std::vector<char>* ex, std::size_t i) {
    return ex && i < ex->size() && (*ex)[i];
  };
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());

  // Nearest and second-nearest squared distances per query, each direction.
  std::vector<int> best_ab(na, -1), best_ba(nb, -1);
  std::vector<double> d1_ab(na, std::numeric_limits<double>::infinity()), d2_ab = d1_ab;
  std::vector<double> d1_ba(nb, std::numeric_limits<double>::infinity()), d2_ba = d1_ba;
  for (int i = 0; i < na; ++i) {
    if (skip(excluded_a, i)) continue;
    for (int j = 0; j < nb; ++j) {
      if (skip(excluded_b, j)) continue;
      const double d = (a[i] - b[j]).squaredNorm();
      if (d < d1_ab[i]) {
        d2_ab[i] = d1_ab[i];
        d1_ab[i] = d;
        best_ab[i] = j;
      } else if (d < d2_ab[i]) {
        d2_ab[i] = d;
      }
      if (d < d1_ba[j]) {
        d2_ba[j] = d1_ba[j];
        d1_ba[j] = d;
        best_ba[j] = i;
      } else if (d < d2_ba[j]) {
        d2_ba[j] = d;
      }
    }
  }

  // Lowe ratio on distances (not squared), both directions, then mutuality.
  const double rr = ratio_test * ratio_test;
  CorrespondenceSet out;
  for (int i = 0; i < na; ++i) {
    const int j = best_ab[i];
    if (j < 0 || best_ba[j] != i) continue;
    if (!(d1_ab[i] < rr * d2_ab[i])) continue;
    if (!(d1_ba[j] < rr * d2_ba[j])) continue;
    out.add(i, j);
  }
  return out;
}

CorrespondenceSet match_keypoints(const std::vector<Keypoint>& a, const std::vector<Keypoint>& b,
                                  double ratio_test) {
  std::vector<Descriptor> da, db;
  std::vector<char> ea, eb;
  da.reserve(a.size());
  ea.reserve(a.size());
  for (const Keypoint& k : a) {
    da.push_back(k.descriptor);
    ea.push_back(k.excluded ? 1 : 0);
  }
  db.reserve(b.size());
  eb.reserve(b.size());
  for (const Keypoint& k : b) {
    db.push_back(k.descriptor);
    eb.push_back(k.excluded ? 1 : 0);
  }
  return match_descriptors(da, db, ratio_test, &ea, &eb);
}

}  // namespace pvd
