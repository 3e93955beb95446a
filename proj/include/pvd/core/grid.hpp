#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace pvd {

// Dense row-major 2D grid. Pixel centers sit at integer coordinates.
template <class T>
struct GridT {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  GridT() = default;
  GridT(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  T& at(int x, int y) {
    assert(in_bounds(x, y));
    return data[static_cast<size_t>(y) * width + x];
  }
  const T& at(int x, int y) const {
    assert(in_bounds(x, y));
    return data[static_cast<size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  template <class U>
  bool same_size(const GridT<U>& o) const {
    return width == o.width && height == o.height;
  }
  size_t size() const { return data.size(); }
  void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

using Grid = GridT<float>;
using Mask = GridT<std::uint8_t>;

// True when (x, y) has full bilinear support.
inline bool in_sample_bounds(int width, int height, double x, double y) {
  return x >= 0.0 && y >= 0.0 && x <= width - 1.0 && y <= height - 1.0;
}
inline bool in_sample_bounds(const Grid& g, double x, double y) {
  return in_sample_bounds(g.width, g.height, x, y);
}

// Bilinear sample; caller guarantees in_sample_bounds.
inline float bilinear(const Grid& g, double x, double y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  x0 = std::min(x0, g.width - 2 < 0 ? 0 : g.width - 2);
  y0 = std::min(y0, g.height - 2 < 0 ? 0 : g.height - 2);
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = std::min(x0 + 1, g.width - 1);
  const int y1 = std::min(y0 + 1, g.height - 1);
  const double v00 = g.at(x0, y0), v10 = g.at(x1, y0);
  const double v01 = g.at(x0, y1), v11 = g.at(x1, y1);
  return static_cast<float>((1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11));
}

// Central differences in the interior, one-sided at the borders.
Grid gradient_x(const Grid& g);
Grid gradient_y(const Grid& g);

// 2x2 average pooling; odd trailing row/column pools what remains.
Grid downsample2x2(const Grid& g);

// Sum over a (2r+1)^2 window, clipped at the borders. Exact, order-deterministic.
Grid box_sum(const Grid& g, int radius);
GridT<double> box_sum(const GridT<double>& g, int radius);

// Number of in-bounds pixels in each (2r+1)^2 window (for border normalization).
Grid box_count(int width, int height, int radius);

}  // namespace pvd
