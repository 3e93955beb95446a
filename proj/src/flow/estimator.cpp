#include "pvd/flow/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "pvd/core/errors.hpp"

namespace pvd {

MaskedGrid warp(const Grid& features, const FlowField& flow) {
  if (!features.same_size(flow.du)) throw DomainError("warp: size mismatch");
  MaskedGrid out(features.width, features.height);
  for (int v = 0; v < features.height; ++v)
    for (int u = 0; u < features.width; ++u) {
      const double x = u + flow.du.at(u, v);
      const double y = v + flow.dv.at(u, v);
      if (in_sample_bounds(features, x, y)) {
        out.values.at(u, v) = bilinear(features, x, y);
      } else {
        out.values.at(u, v) = 0.f;
        out.valid.at(u, v) = 0;
      }
    }
  return out;
}

MaskedGrid offset_warp(const Grid& features, const FlowField& flow, const Grid& offset_u,
                       const Grid& offset_v) {
  if (!features.same_size(flow.du) || !features.same_size(offset_u) || !features.same_size(offset_v))
    throw DomainError("offset_warp: size mismatch");
  MaskedGrid out(features.width, features.height);
  for (int v = 0; v < features.height; ++v)
    for (int u = 0; u < features.width; ++u) {
      const double x = u + flow.du.at(u, v) + offset_u.at(u, v);
      const double y = v + flow.dv.at(u, v) + offset_v.at(u, v);
      if (in_sample_bounds(features, x, y)) {
        out.values.at(u, v) = bilinear(features, x, y);
      } else {
        out.values.at(u, v) = 0.f;
        out.valid.at(u, v) = 0;
      }
    }
  return out;
}

void default_offsets(const FlowField& flow, int window_radius, Grid& offset_u, Grid& offset_v) {
  const int w = flow.width(), h = flow.height(), r = window_radius;
  offset_u = Grid(w, h, 0.f);
  offset_v = Grid(w, h, 0.f);
  // Affine model c(dx,dy) = a0 + a1 dx + a2 dy per window; the correction is
  // the model value at the center minus the raw flow, which vanishes
  // identically for affine flow. Where the window is calm the plain
  // least-squares fit is kept (for a full interior window its center value
  // is just the window mean, courtesy of vanishing cross-moments). Windows
  // with high flow variance straddle a motion boundary or contain outliers;
  // there a reweighted fit pulls the model onto the majority surface instead
  // of averaging across the discontinuity.
  GridT<double> su(w, h), sv(w, h), suu(w, h), svv(w, h), sxu(w, h), syu(w, h), sxv(w, h),
      syv(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const double du = flow.du.at(u, v), dv = flow.dv.at(u, v);
      su.at(u, v) = du;
      sv.at(u, v) = dv;
      suu.at(u, v) = du * du;
      svv.at(u, v) = dv * dv;
      sxu.at(u, v) = u * du;
      syu.at(u, v) = v * du;
      sxv.at(u, v) = u * dv;
      syv.at(u, v) = v * dv;
    }
  const GridT<double> bu_ = box_sum(su, r), bv_ = box_sum(sv, r);
  const GridT<double> buu = box_sum(suu, r), bvv = box_sum(svv, r);
  const GridT<double> bxu = box_sum(sxu, r), byu = box_sum(syu, r);
  const GridT<double> bxv = box_sum(sxv, r), byv = box_sum(syv, r);
  const double full = double((2 * r + 1) * (2 * r + 1));
  // Sum of dx^2 (= dy^2) over a full window.
  const double s2 = full * (r * (r + 1)) / 3.0;
  constexpr double kRoughTrigger = 0.5;  // px std dev that marks a mixed window
  constexpr double kCauchySigma2 = 1.0;  // px^2 scale of the reweighting
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const bool interior = u >= r && u < w - r && v >= r && v < h - r;
      double a0u, a1u, a2u, a0v, a1v, a2v;
      if (interior) {
        a0u = bu_.at(u, v) / full;
        a1u = (bxu.at(u, v) - u * bu_.at(u, v)) / s2;
        a2u = (byu.at(u, v) - v * bu_.at(u, v)) / s2;
        a0v = bv_.at(u, v) / full;
        a1v = (bxv.at(u, v) - u * bv_.at(u, v)) / s2;
        a2v = (byv.at(u, v) - v * bv_.at(u, v)) / s2;
        const double var = buu.at(u, v) / full - a0u * a0u + bvv.at(u, v) / full - a0v * a0v;
        if (var <= kRoughTrigger * kRoughTrigger) {
          offset_u.at(u, v) = static_cast<float>(a0u - flow.du.at(u, v));
          offset_v.at(u, v) = static_cast<float>(a0v - flow.dv.at(u, v));
          continue;
        }
      } else {
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        Eigen::Vector3d bu = Eigen::Vector3d::Zero(), bv = Eigen::Vector3d::Zero();
        for (int dy = -r; dy <= r; ++dy) {
          const int y = v + dy;
          if (y < 0 || y >= h) continue;
          for (int dx = -r; dx <= r; ++dx) {
            const int x = u + dx;
            if (x < 0 || x >= w) continue;
            const Eigen::Vector3d row{1.0, double(dx), double(dy)};
            m += row * row.transpose();
            bu += row * flow.du.at(x, y);
            bv += row * flow.dv.at(x, y);
          }
        }
        const Eigen::Matrix3d inv = m.inverse();
        if (!inv.allFinite()) continue;
        a0u = (inv * bu)(0), a1u = (inv * bu)(1), a2u = (inv * bu)(2);
        a0v = (inv * bv)(0), a1v = (inv * bv)(1), a2v = (inv * bv)(2);
        offset_u.at(u, v) = static_cast<float>(a0u - flow.du.at(u, v));
        offset_v.at(u, v) = static_cast<float>(a0v - flow.dv.at(u, v));
        continue;
      }
      // Mixed interior window: two reweighting rounds with a joint Cauchy
      // weight on both flow components.
      for (int round = 0; round < 2; ++round) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rbu = Eigen::Vector3d::Zero(), rbv = Eigen::Vector3d::Zero();
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            const int x = u + dx, y = v + dy;
            const double fu = flow.du.at(x, y), fv = flow.dv.at(x, y);
            const double ru = fu - (a0u + a1u * dx + a2u * dy);
            const double rv = fv - (a0v + a1v * dx + a2v * dy);
            const double wgt = 1.0 / (1.0 + (ru * ru + rv * rv) / kCauchySigma2);
            const Eigen::Vector3d row{1.0, double(dx), double(dy)};
            m += wgt * row * row.transpose();
            rbu += wgt * row * fu;
            rbv += wgt * row * fv;
          }
        const Eigen::Matrix3d inv = m.inverse();
        if (!inv.allFinite()) break;
        a0u = (inv * rbu)(0), a1u = (inv * rbu)(1), a2u = (inv * rbu)(2);
        a0v = (inv * rbv)(0), a1v = (inv * rbv)(1), a2v = (inv * rbv)(2);
      }
      offset_u.at(u, v) = static_cast<float>(a0u - flow.du.at(u, v));
      offset_v.at(u, v) = static_cast<float>(a0v - flow.dv.at(u, v));
    }
  }
}

namespace {

// Per-sample variance below this counts as textureless (cost 0): genuinely
// flat patches cannot be normalized meaningfully.
constexpr double kMinVariance = 1e-10;

double ncc_from_sums(double cnt, double sa, double saa, double sb, double sbb, double sab) {
  if (cnt < 3.0) return 0.0;  // too few joint samples to normalize
  const double cov = sab - sa * sb / cnt;
  const double va = saa - sa * sa / cnt;
  const double vb = sbb - sb * sb / cnt;
  if (va < kMinVariance * cnt || vb < kMinVariance * cnt) return 0.0;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

}  // namespace

CostVolume correlation_volume(const Grid& f1, const MaskedGrid& f2, int max_disp, int patch_radius) {
  if (!f1.same_size(f2.values)) throw DomainError("correlation_volume: size mismatch");
  const int w = f1.width, h = f1.height, d = max_disp, r = patch_radius;
  using DGrid = GridT<double>;

  // Target samples zeroed where invalid, so plain sums skip them. All sums run
  // in double: the E[x^2] - E[x]^2 cancellation is catastrophic in float on
  // low-contrast patches and produces unbounded fake correlations.
  DGrid a(w, h), aa(w, h), m(w, h), b(w, h), bb(w, h);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double av = f1.data[i];
    a.data[i] = av;
    aa.data[i] = av * av;
    const bool ok = f2.valid.data[i] != 0;
    m.data[i] = ok ? 1.0 : 0.0;
    b.data[i] = ok ? f2.values.data[i] : 0.0;
    bb.data[i] = b.data[i] * b.data[i];
  }
  // Window sums that do not depend on the displacement. The fast path below
  // reads them instead of re-summing; pixels whose source or shifted window
  // is clipped or contains invalid samples fall back to a direct loop.
  const DGrid sum_a = box_sum(a, r), sum_aa = box_sum(aa, r);
  const DGrid sum_m = box_sum(m, r), sum_b = box_sum(b, r), sum_bb = box_sum(bb, r);
  const double full = double((2 * r + 1) * (2 * r + 1));

  CostVolume vol;
  vol.width = w;
  vol.height = h;
  vol.max_disp = d;
  vol.planes.assign(static_cast<std::size_t>(2 * d + 1) * (2 * d + 1), Grid());

  DGrid prod(w, h);
  for (int dy = -d; dy <= d; ++dy) {
    for (int dx = -d; dx <= d; ++dx) {
      for (int v = 0; v < h; ++v) {
        const int ys = v + dy;
        const bool yok = ys >= 0 && ys < h;
        for (int u = 0; u < w; ++u) {
          const int xs = u + dx;
          prod.at(u, v) = (yok && xs >= 0 && xs < w) ? a.at(u, v) * b.at(xs, ys) : 0.0;
        }
      }
      const DGrid sum_ab = box_sum(prod, r);

      Grid cost(w, h, 0.f);
      for (int v = 0; v < h; ++v) {
        const int ys = v + dy;
        const bool y_fast = v >= r && v < h - r && ys >= r && ys < h - r;
        for (int u = 0; u < w; ++u) {
          const int xs = u + dx;
          double c;
          if (y_fast && u >= r && u < w - r && xs >= r && xs < w - r &&
              sum_m.at(xs, ys) == full) {
            c = ncc_from_sums(full, sum_a.at(u, v), sum_aa.at(u, v), sum_b.at(xs, ys),
                              sum_bb.at(xs, ys), sum_ab.at(u, v));
          } else {
            double cnt = 0, sa = 0, saa = 0, sb = 0, sbb = 0, sab = 0;
            for (int py = std::max(0, v - r); py <= std::min(h - 1, v + r); ++py) {
              const int qy = py + dy;
              if (qy < 0 || qy >= h) continue;
              for (int px = std::max(0, u - r); px <= std::min(w - 1, u + r); ++px) {
                const int qx = px + dx;
                if (qx < 0 || qx >= w || m.at(qx, qy) == 0.0) continue;
                const double av = a.at(px, py), bv = b.at(qx, qy);
                cnt += 1;
                sa += av;
                saa += av * av;
                sb += bv;
                sbb += bv * bv;
                sab += av * bv;
              }
            }
            c = ncc_from_sums(cnt, sa, saa, sb, sbb, sab);
          }
          cost.at(u, v) = static_cast<float>(c);
        }
      }
      vol.plane(dx, dy) = std::move(cost);
    }
  }
  return vol;
}

namespace {

// Quadratic vertex through (-1,cm) (0,c0) (+1,cp), clamped to [-0.5, 0.5].
double subpixel_offset(double cm, double c0, double cp) {
  const double denom = cm - 2.0 * c0 + cp;
  if (denom >= -1e-12) return 0.0;  // not a strict local maximum
  return std::clamp((cm - cp) / (2.0 * denom), -0.5, 0.5);
}

}  // namespace

ResidualEstimate estimate_residual(const CostVolume& volume) {
  const int w = volume.width, h = volume.height, d = volume.max_disp;
  ResidualEstimate out{FlowField(w, h, true), Grid(w, h, 0.f)};

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      // Start at zero displacement and replace only on strictly larger cost:
      // flat volumes (and exact ties) resolve to no motion.
      double best = volume.plane(0, 0).at(u, v);
      int bx = 0, by = 0;
      for (int dy = -d; dy <= d; ++dy)
        for (int dx = -d; dx <= d; ++dx) {
          const double c = volume.plane(dx, dy).at(u, v);
          if (c > best) {
            best = c;
            bx = dx;
            by = dy;
          }
        }
      // Confidence = margin over the best cost outside the peak's immediate
      // neighbourhood. A flat or ridge-shaped cost surface (ambiguous texture)
      // scores ~0 even though peak-minus-mean would look healthy.
      double runner_up = -1.0;
      for (int dy = -d; dy <= d; ++dy)
        for (int dx = -d; dx <= d; ++dx) {
          if (std::abs(dx - bx) <= 1 && std::abs(dy - by) <= 1) continue;
          runner_up = std::max(runner_up, double(volume.plane(dx, dy).at(u, v)));
        }
      double du = bx, dv = by;
      // A (near-)perfect correlation peak is already aligned; fitting a
      // parabola through its asymmetric neighbours would only add drift.
      if (best < 1.0 - 1e-4) {
        if (bx > -d && bx < d)
          du +=
              subpixel_offset(volume.plane(bx - 1, by).at(u, v), best, volume.plane(bx + 1, by).at(u, v));
        if (by > -d && by < d)
          dv +=
              subpixel_offset(volume.plane(bx, by - 1).at(u, v), best, volume.plane(bx, by + 1).at(u, v));
      }
      out.flow.du.at(u, v) = static_cast<float>(du);
      out.flow.dv.at(u, v) = static_cast<float>(dv);
      out.confidence.at(u, v) =
          static_cast<float>(std::max(0.0, best - (runner_up > -1.0 ? runner_up : 0.0)));
    }
  }
  return out;
}

FlowField upsample_flow(const FlowField& coarse, int fine_width, int fine_height) {
  FlowField fine(fine_width, fine_height, true);
  for (int v = 0; v < fine_height; ++v) {
    const double yc = std::clamp((v - 0.5) / 2.0, 0.0, coarse.height() - 1.0);
    for (int u = 0; u < fine_width; ++u) {
      const double xc = std::clamp((u - 0.5) / 2.0, 0.0, coarse.width() - 1.0);
      fine.du.at(u, v) = 2.f * bilinear(coarse.du, xc, yc);
      fine.dv.at(u, v) = 2.f * bilinear(coarse.dv, xc, yc);
    }
  }
  return fine;
}

FlowField median_filter3(const FlowField& flow) {
  FlowField out = flow;
  const int w = flow.width(), h = flow.height();
  float vals[9];
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      for (const Grid* src : {&flow.du, &flow.dv}) {
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = u + dx, y = v + dy;
            if (x >= 0 && x < w && y >= 0 && y < h) vals[n++] = src->at(x, y);
          }
        std::sort(vals, vals + n);
        (src == &flow.du ? out.du : out.dv).at(u, v) = vals[(n - 1) / 2];
      }
    }
  return out;
}

namespace {

// Joint-bilateral diffusion: every pixel's flow is re-estimated as a weighted
// window mean with weight = match confidence x intensity affinity. Ambiguous
// matches (occlusions, flat or ridge-like texture) inherit flow from
// well-matched neighbours, while the edge term stops flow from bleeding
// across object boundaries with their different motion.
void confidence_smooth(FlowField& flow, const Grid& confidence, const Grid& intensity, int radius,
                       int iterations) {
  const int w = flow.width(), h = flow.height();
  // exp(-beta |dI|) on quantized intensity differences.
  constexpr double kEdgeBeta = 10.0;
  constexpr int kLutSize = 512;
  static const auto lut = [] {
    std::array<float, kLutSize> t{};
    for (int i = 0; i < kLutSize; ++i)
      t[i] = static_cast<float>(std::exp(-kEdgeBeta * i / double(kLutSize - 1)));
    return t;
  }();

  Grid du = flow.du, dv = flow.dv;
  for (int it = 0; it < iterations; ++it) {
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const float center = intensity.at(u, v);
        double sum_w = 0.0, sum_du = 0.0, sum_dv = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          const int y = v + dy;
          if (y < 0 || y >= h) continue;
          for (int dx = -radius; dx <= radius; ++dx) {
            const int x = u + dx;
            if (x < 0 || x >= w) continue;
            const double diff = std::abs(intensity.at(x, y) - center);
            const int bin = std::min(kLutSize - 1, static_cast<int>(diff * (kLutSize - 1)));
            const double wt = confidence.at(x, y) * lut[bin];
            sum_w += wt;
            sum_du += wt * du.at(x, y);
            sum_dv += wt * dv.at(x, y);
          }
        }
        // The pixel's own flow acts as a tiny prior so zero-confidence
        // neighbourhoods stay put instead of dividing by zero.
        const double eps = 1e-6;
        flow.du.at(u, v) = static_cast<float>((sum_du + eps * du.at(u, v)) / (sum_w + eps));
        flow.dv.at(u, v) = static_cast<float>((sum_dv + eps * dv.at(u, v)) / (sum_w + eps));
      }
    }
    if (it + 1 < iterations) {
      du = flow.du;
      dv = flow.dv;
    }
  }
}

// Gradient-based subpixel polish at the finest scale. The pyramid tends to
// land within about one pixel of the optimum, which is inside the basin where
// linearized brightness constancy holds, so a couple of damped Gauss-Newton
// steps sharpen the smooth part of the field well below the quantization of
// the discrete matcher. The target image and its gradients are warped by the
// current flow once per iteration; each pixel then solves a 2x2 system over an
// edge-weighted window. Residuals that brightness constancy cannot explain
// (occlusions, boundary mixtures) are down-weighted so those pixels keep the
// matched flow instead of chasing a bad linearization.
void photometric_refine(FlowField& flow, const PyramidLevel& lvl1, const PyramidLevel& lvl2,
                        int radius, int iterations) {
  const int w = flow.width(), h = flow.height();
  constexpr double kEdgeBeta = 10.0;
  constexpr int kLutSize = 512;
  static const auto lut = [] {
    std::array<float, kLutSize> t{};
    for (int i = 0; i < kLutSize; ++i)
      t[i] = static_cast<float>(std::exp(-kEdgeBeta * i / double(kLutSize - 1)));
    return t;
  }();

  for (int it = 0; it < iterations; ++it) {
    const MaskedGrid tgt = warp(lvl2.intensity, flow);
    const MaskedGrid tgx = warp(lvl2.grad_x, flow);
    const MaskedGrid tgy = warp(lvl2.grad_y, flow);
    Grid ndu = flow.du, ndv = flow.dv;
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const float center = lvl1.intensity.at(u, v);
        double gxx = 0, gxy = 0, gyy = 0, bx = 0, by = 0, wsum = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          const int y = v + dy;
          if (y < 0 || y >= h) continue;
          for (int dx = -radius; dx <= radius; ++dx) {
            const int x = u + dx;
            if (x < 0 || x >= w || !tgt.valid.at(x, y)) continue;
            const double r = lvl1.intensity.at(x, y) - tgt.values.at(x, y);
            const double diff = std::abs(lvl1.intensity.at(x, y) - center);
            const int bin = std::min(kLutSize - 1, static_cast<int>(diff * (kLutSize - 1)));
            // Cauchy-style attenuation: large residuals are occlusion or
            // mixed-motion evidence, not signal for the update.
            const double wt = lut[bin] / (1.0 + (r / 0.08) * (r / 0.08));
            const double gx = tgx.values.at(x, y), gy = tgy.values.at(x, y);
            gxx += wt * gx * gx;
            gxy += wt * gx * gy;
            gyy += wt * gy * gy;
            bx += wt * gx * r;
            by += wt * gy * r;
            wsum += wt;
          }
        }
        // Damped solve; skip near-textureless windows where the system says
        // nothing and the matched flow is the best available answer.
        const double damp = 1e-6;
        const double det = (gxx + damp) * (gyy + damp) - gxy * gxy;
        if (wsum < 1.0 || gxx + gyy < 1e-5 || det <= 0.0) continue;
        double sx = ((gyy + damp) * bx - gxy * by) / det;
        double sy = ((gxx + damp) * by - gxy * bx) / det;
        sx = std::clamp(sx, -0.75, 0.75);
        sy = std::clamp(sy, -0.75, 0.75);
        ndu.at(u, v) = static_cast<float>(flow.du.at(u, v) + sx);
        ndv.at(u, v) = static_cast<float>(flow.dv.at(u, v) + sy);
      }
    }
    flow.du = std::move(ndu);
    flow.dv = std::move(ndv);
  }
}

}  // namespace

FlowField estimate_flow(const Grid& image1, const Grid& image2, const FlowConfig& cfg,
                        FlowTrace* trace) {
  if (!image1.same_size(image2)) throw DomainError("estimate_flow: size mismatch");
  const Pyramid pyr1 = build_pyramid(image1, cfg.levels);
  const Pyramid pyr2 = build_pyramid(image2, cfg.levels);
  if (trace) trace->records.clear();

  FlowField flow;
  for (int l = cfg.levels - 1; l >= 0; --l) {
    const Grid& f1 = pyr1.levels[l].intensity;
    const Grid& f2 = pyr2.levels[l].intensity;
    int coarser_read = -1;
    if (l == cfg.levels - 1) {
      flow = FlowField(f1.width, f1.height, true);
    } else {
      flow = upsample_flow(flow, f1.width, f1.height);
      coarser_read = l + 1;
    }

    MaskedGrid warped;
    Grid ou, ov;
    if (cfg.use_offset_sampling && l > 0) {
      default_offsets(flow, cfg.patch_radius, ou, ov);
      // Keep every offset undoable: as long as |offset| stays below the
      // search radius, the hypothesis "the carried flow was already right"
      // (residual = -offset) remains inside the correlation volume, so a
      // misleading fit cannot strand the pixel. Clamp component-wise to
      // max_disp - 1. Offsets in the border ribbon come from clipped,
      // one-sided fit windows and are extrapolation artifacts; drop them.
      const float reach = static_cast<float>(cfg.max_disp - 1);
      const int rr = cfg.patch_radius;
      for (int v = 0; v < f1.height; ++v)
        for (int u = 0; u < f1.width; ++u) {
          const std::size_t i = static_cast<std::size_t>(v) * f1.width + u;
          if (u < rr || u >= f1.width - rr || v < rr || v >= f1.height - rr) {
            ou.data[i] = 0.f;
            ov.data[i] = 0.f;
            continue;
          }
          ou.data[i] = std::clamp(ou.data[i], -reach, reach);
          ov.data[i] = std::clamp(ov.data[i], -reach, reach);
        }
      warped = offset_warp(f2, flow, ou, ov);
    } else {
      ou = Grid(f1.width, f1.height, 0.f);
      ov = ou;
      warped = warp(f2, flow);
    }
    const CostVolume vol = correlation_volume(f1, warped, cfg.max_disp, cfg.patch_radius);
    const ResidualEstimate res = estimate_residual(vol);
    for (std::size_t i = 0; i < flow.du.data.size(); ++i) {
      if (res.confidence.data[i] < cfg.min_confidence) continue;  // keep prior flow
      // The match was found around (flow + offset), so the full residual
      // relative to the carried flow includes the sampling offset.
      flow.du.data[i] += ou.data[i] + res.flow.du.data[i];
      flow.dv.data[i] += ov.data[i] + res.flow.dv.data[i];
    }
    confidence_smooth(flow, res.confidence, f1, cfg.patch_radius, 2);
    if (cfg.median_filter) flow = median_filter3(flow);
    if (trace) trace->records.push_back({l, coarser_read, &cfg});
  }
  photometric_refine(flow, pyr1.levels[0], pyr2.levels[0], cfg.patch_radius, 2);

  for (int v = 0; v < flow.height(); ++v)
    for (int u = 0; u < flow.width(); ++u)
      flow.valid.at(u, v) =
          in_sample_bounds(flow.width(), flow.height(), u + flow.du.at(u, v), v + flow.dv.at(u, v)) ? 1
                                                                                                    : 0;
  return flow;
}

}  // namespace pvd
