#pragma once

#include <string>

#include "pvd/core/grid.hpp"
#include "pvd/io/image_io.hpp"

namespace pvd {

// Dense per-pixel displacement field with a validity mask.
struct FlowField {
  Grid du, dv;
  Mask valid;

  FlowField() = default;
  FlowField(int w, int h, bool all_valid = true)
      : du(w, h, 0.f), dv(w, h, 0.f), valid(w, h, all_valid ? 1 : 0) {}

  int width() const { return du.width; }
  int height() const { return du.height; }
  bool same_size(const FlowField& o) const { return du.same_size(o.du); }
};

// Middlebury .flo: float magic 202021.25, int32 width, int32 height,
// row-major interleaved float32 (du, dv). Invalid pixels stored as 1e9.
void write_flo(const std::string& path, const FlowField& flow);
FlowField read_flo(const std::string& path);

// Standard flow color wheel rendering; max_mag <= 0 autoscales.
RgbImage flow_to_color(const FlowField& flow, double max_mag = 0.0);

}  // namespace pvd
