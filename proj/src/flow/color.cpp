#include <array>
#include <cmath>

#include "pvd/flow/field.hpp"

namespace pvd {

namespace {

// Middlebury-style color wheel: RY/YG/GC/CB/BM/MR sectors.
struct ColorWheel {
  std::vector<std::array<float, 3>> colors;

  ColorWheel() {
    const int ry = 15, yg = 6, gc = 4, cb = 11, bm = 13, mr = 6;
    auto ramp = [&](int n, float r0, float g0, float b0, float r1, float g1, float b1) {
      for (int i = 0; i < n; ++i) {
        const float a = static_cast<float>(i) / n;
        colors.push_back({r0 + a * (r1 - r0), g0 + a * (g1 - g0), b0 + a * (b1 - b0)});
      }
    };
    ramp(ry, 1, 0, 0, 1, 1, 0);
    ramp(yg, 1, 1, 0, 0, 1, 0);
    ramp(gc, 0, 1, 0, 0, 1, 1);
    ramp(cb, 0, 1, 1, 0, 0, 1);
    ramp(bm, 0, 0, 1, 1, 0, 1);
    ramp(mr, 1, 0, 1, 1, 0, 0);
  }

  std::array<float, 3> lookup(float u, float v) const {
    const float mag = std::sqrt(u * u + v * v);
    const float angle = std::atan2(-v, -u) / 3.14159265358979f;
    const float fk = (angle + 1.f) / 2.f * (colors.size() - 1);
    const int k0 = static_cast<int>(fk);
    const int k1 = (k0 + 1) % static_cast<int>(colors.size());
    const float f = fk - k0;
    std::array<float, 3> out{};
    for (int c = 0; c < 3; ++c) {
      float col = (1 - f) * colors[k0][c] + f * colors[k1][c];
      if (mag <= 1.f)
        col = 1.f - mag * (1.f - col);  // desaturate toward white at small magnitudes
      else
        col *= 0.75f;
      out[c] = col;
    }
    return out;
  }
};

}  // namespace

RgbImage flow_to_color(const FlowField& flow, double max_mag) {
  static const ColorWheel wheel;
  if (max_mag <= 0.0) {
    for (int y = 0; y < flow.height(); ++y)
      for (int x = 0; x < flow.width(); ++x)
        if (flow.valid.at(x, y)) {
          const double m = std::hypot(flow.du.at(x, y), flow.dv.at(x, y));
          max_mag = std::max(max_mag, m);
        }
    if (max_mag <= 0.0) max_mag = 1.0;
  }
  RgbImage out(flow.width(), flow.height());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.valid.at(x, y)) {
        out.at(x, y) = {0, 0, 0};
        continue;
      }
      out.at(x, y) = wheel.lookup(static_cast<float>(flow.du.at(x, y) / max_mag),
                                  static_cast<float>(flow.dv.at(x, y) / max_mag));
    }
  }
  return out;
}

}  // namespace pvd
