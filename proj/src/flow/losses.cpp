#include "pvd/flow/losses.hpp"

#include <cmath>

#include "pvd/core/errors.hpp"

namespace pvd {

double charbonnier(double squared_residual) {
  return std::pow(squared_residual + kCharbonnierEps * kCharbonnierEps, kCharbonnierQ);
}

Mask occlusion_mask(const FlowField& forward, const FlowField& backward, double alpha1,
                    double alpha2) {
  if (!forward.same_size(backward)) throw DomainError("occlusion_mask: size mismatch");
  const int w = forward.width(), h = forward.height();
  Mask occluded(w, h, 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const double fu = forward.du.at(u, v), fv = forward.dv.at(u, v);
      const double x = u + fu, y = v + fv;
      if (!in_sample_bounds(w, h, x, y)) {
        occluded.at(u, v) = 1;
        continue;
      }
      const double bu = bilinear(backward.du, x, y), bv = bilinear(backward.dv, x, y);
      const double round_trip = (fu + bu) * (fu + bu) + (fv + bv) * (fv + bv);
      const double bound = alpha1 * (fu * fu + fv * fv + bu * bu + bv * bv) + alpha2;
      if (round_trip > bound) occluded.at(u, v) = 1;
    }
  return occluded;
}

double photometric_loss(const Grid& image1, const Grid& image2, const FlowField& flow,
                        const Mask& include) {
  if (!image1.same_size(image2) || !image1.same_size(flow.du) || !image1.same_size(include))
    throw DomainError("photometric_loss: size mismatch");
  double sum = 0.0;
  long count = 0;
  for (int v = 0; v < image1.height; ++v)
    for (int u = 0; u < image1.width; ++u) {
      if (!include.at(u, v)) continue;
      const double x = u + flow.du.at(u, v);
      const double y = v + flow.dv.at(u, v);
      if (!in_sample_bounds(image2, x, y)) continue;
      const double r = image1.at(u, v) - bilinear(image2, x, y);
      sum += charbonnier(r * r);
      ++count;
    }
  if (count == 0) throw EmptyMask("photometric_loss: no contributing pixel");
  return sum / count;
}

double smoothness_loss(const FlowField& flow, const Grid& image, double beta) {
  if (!image.same_size(flow.du)) throw DomainError("smoothness_loss: size mismatch");
  const Grid ix = gradient_x(image), iy = gradient_y(image);
  const Grid dux = gradient_x(flow.du), duy = gradient_y(flow.du);
  const Grid dvx = gradient_x(flow.dv), dvy = gradient_y(flow.dv);
  double sum = 0.0;
  const std::size_t n = image.data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double wx = std::exp(-beta * std::abs(ix.data[i]));
    const double wy = std::exp(-beta * std::abs(iy.data[i]));
    sum += wx * (std::abs(dux.data[i]) + std::abs(dvx.data[i])) +
           wy * (std::abs(duy.data[i]) + std::abs(dvy.data[i]));
  }
  return sum / static_cast<double>(n);
}

double self_supervision_loss(const FlowField& student, const FlowField& teacher,
                             const Mask& include) {
  if (!student.same_size(teacher) || !student.du.same_size(include))
    throw DomainError("self_supervision_loss: size mismatch");
  double sum = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < include.data.size(); ++i) {
    if (!include.data[i]) continue;
    const double du = student.du.data[i] - teacher.du.data[i];
    const double dv = student.dv.data[i] - teacher.dv.data[i];
    sum += charbonnier(du * du + dv * dv);
    ++count;
  }
  if (count == 0) throw EmptyMask("self_supervision_loss: no contributing pixel");
  return sum / count;
}

LossWeights lambda_schedule(double progress, const FlowConfig& cfg) {
  if (progress < 0.0 || progress > 1.0) throw DomainError("lambda_schedule: progress outside [0,1]");
  LossWeights w{cfg.lambda_photo, cfg.lambda_smooth, 0.0};
  if (progress > 0.6)
    w.self = cfg.lambda_self_max;
  else if (progress > 0.5)
    w.self = cfg.lambda_self_max * (progress - 0.5) / 0.1;
  return w;
}

double total_loss(double photo, double smooth, double self, const LossWeights& w) {
  return w.photo * photo + w.smooth * smooth + w.self * self;
}

}  // namespace pvd
