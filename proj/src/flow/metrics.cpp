#include "pvd/flow/metrics.hpp"

#include <cmath>

#include "pvd/core/errors.hpp"

namespace pvd {

FlowMetrics flow_metrics(const FlowField& flow, const FlowField& gt, const Mask& valid) {
  if (!flow.same_size(gt) || !flow.du.same_size(valid)) throw DomainError("flow_metrics: size mismatch");
  FlowMetrics m;
  long n_all = 0, n_noc = 0, out_all = 0, out_noc = 0;
  double epe_sum = 0.0;
  for (std::size_t i = 0; i < valid.data.size(); ++i) {
    if (!valid.data[i]) continue;
    const double du = flow.du.data[i] - gt.du.data[i];
    const double dv = flow.dv.data[i] - gt.dv.data[i];
    const double epe = std::sqrt(du * du + dv * dv);
    const double gt_mag = std::sqrt(double(gt.du.data[i]) * gt.du.data[i] +
                                    double(gt.dv.data[i]) * gt.dv.data[i]);
    const bool outlier = epe > 3.0 && epe > 0.05 * gt_mag;
    ++n_all;
    epe_sum += epe;
    out_all += outlier;
    if (gt.valid.data[i]) {
      ++n_noc;
      out_noc += outlier;
    }
  }
  if (n_all > 0) {
    m.epe_mean = epe_sum / n_all;
    m.f1_all = double(out_all) / n_all;
  }
  if (n_noc > 0) m.out_noc = double(out_noc) / n_noc;
  return m;
}

}  // namespace pvd
