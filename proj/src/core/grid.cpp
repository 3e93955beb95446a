#include "pvd/core/grid.hpp"

namespace pvd {

Grid gradient_x(const Grid& g) {
  Grid out(g.width, g.height);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      float v;
      if (g.width == 1) {
        v = 0.f;
      } else if (x == 0) {
        v = g.at(1, y) - g.at(0, y);
      } else if (x == g.width - 1) {
        v = g.at(x, y) - g.at(x - 1, y);
      } else {
        v = 0.5f * (g.at(x + 1, y) - g.at(x - 1, y));
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

Grid gradient_y(const Grid& g) {
  Grid out(g.width, g.height);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      float v;
      if (g.height == 1) {
        v = 0.f;
      } else if (y == 0) {
        v = g.at(x, 1) - g.at(x, 0);
      } else if (y == g.height - 1) {
        v = g.at(x, y) - g.at(x, y - 1);
      } else {
        v = 0.5f * (g.at(x, y + 1) - g.at(x, y - 1));
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

Grid downsample2x2(const Grid& g) {
  const int nw = (g.width + 1) / 2;
  const int nh = (g.height + 1) / 2;
  Grid out(nw, nh);
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      double sum = 0.0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx;
          const int sy = 2 * y + dy;
          if (sx < g.width && sy < g.height) {
            sum += g.at(sx, sy);
            ++n;
          }
        }
      }
      out.at(x, y) = static_cast<float>(sum / n);
    }
  }
  return out;
}

namespace {

// Separable two-pass window sum with double accumulators.
template <class T>
GridT<T> box_sum_impl(const GridT<T>& g, int radius) {
  GridT<T> tmp(g.width, g.height);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double s = 0.0;
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(g.width - 1, x + radius);
      for (int sx = x0; sx <= x1; ++sx) s += g.at(sx, y);
      tmp.at(x, y) = static_cast<T>(s);
    }
  }
  GridT<T> out(g.width, g.height);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double s = 0.0;
      const int y0 = std::max(0, y - radius);
      const int y1 = std::min(g.height - 1, y + radius);
      for (int sy = y0; sy <= y1; ++sy) s += tmp.at(x, sy);
      out.at(x, y) = static_cast<T>(s);
    }
  }
  return out;
}

}  // namespace

Grid box_sum(const Grid& g, int radius) { return box_sum_impl(g, radius); }
GridT<double> box_sum(const GridT<double>& g, int radius) { return box_sum_impl(g, radius); }

Grid box_count(int width, int height, int radius) {
  Grid out(width, height);
  for (int y = 0; y < height; ++y) {
    const int ny = std::min(height - 1, y + radius) - std::max(0, y - radius) + 1;
    for (int x = 0; x < width; ++x) {
      const int nx = std::min(width - 1, x + radius) - std::max(0, x - radius) + 1;
      out.at(x, y) = static_cast<float>(nx * ny);
    }
  }
  return out;
}

}  // namespace pvd
