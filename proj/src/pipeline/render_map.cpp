#include "pvd/pipeline/render_map.hpp"

#include <algorithm>
#include <cmath>

namespace pvd {

namespace {

struct Bounds {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

  void grow(double x, double y) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
};

void put(RgbImage& img, int x, int y, const std::array<float, 3>& c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  img.at(x, y) = c;
}

void disk(RgbImage& img, int cx, int cy, int r, const std::array<float, 3>& c) {
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * r) put(img, cx + dx, cy + dy, c);
}

void line(RgbImage& img, int x0, int y0, int x1, int y1, const std::array<float, 3>& c) {
  const int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    put(img, static_cast<int>(std::lround(x0 + t * (x1 - x0))),
        static_cast<int>(std::lround(y0 + t * (y1 - y0))), c);
  }
}

}  // namespace

RgbImage render_map_image(const WorldMap& map, double pixels_per_meter) {
  Bounds b;
  bool any = false;
  auto grow = [&](double x, double y) {
    if (!any) {
      b = {x, x, y, y};
      any = true;
    } else {
      b.grow(x, y);
    }
  };
  for (const auto& p : map.map_points) grow(p.position.x(), p.position.y());
  for (const auto& kf : map.keyframes) {
    const Eigen::Vector3d c = kf.pose.center();
    grow(c.x(), c.y());
  }
  for (const auto& box : map.boxes3d) grow(box.center.x(), box.center.y());
  const double margin = 2.0;
  b.x_min -= margin;
  b.x_max += margin;
  b.y_min -= margin;
  b.y_max += margin;

  const int w = std::max(32, static_cast<int>(std::ceil((b.x_max - b.x_min) * pixels_per_meter)));
  const int h = std::max(32, static_cast<int>(std::ceil((b.y_max - b.y_min) * pixels_per_meter)));
  RgbImage img(w, h);
  for (auto& px : img.pixels) px = {0.07f, 0.07f, 0.09f};

  // Image y runs down; world y runs up.
  auto to_px = [&](double x, double y) {
    return std::pair<int, int>{static_cast<int>(std::lround((x - b.x_min) * pixels_per_meter)),
                               static_cast<int>(std::lround((b.y_max - y) * pixels_per_meter))};
  };

  for (const auto& p : map.map_points) {
    const auto [x, y] = to_px(p.position.x(), p.position.y());
    put(img, x, y, p.box3d_tag >= 0 ? std::array<float, 3>{0.85f, 0.75f, 0.35f}
                                    : std::array<float, 3>{0.45f, 0.45f, 0.48f});
  }

  for (std::size_t i = 1; i < map.keyframes.size(); ++i) {
    const Eigen::Vector3d a = map.keyframes[i - 1].pose.center();
    const Eigen::Vector3d c = map.keyframes[i].pose.center();
    const auto [x0, y0] = to_px(a.x(), a.y());
    const auto [x1, y1] = to_px(c.x(), c.y());
    line(img, x0, y0, x1, y1, {0.25f, 0.55f, 0.95f});
  }
  for (const auto& kf : map.keyframes) {
    const Eigen::Vector3d c = kf.pose.center();
    const auto [x, y] = to_px(c.x(), c.y());
    disk(img, x, y, 2, {0.25f, 0.55f, 0.95f});
  }

  for (const auto& box : map.boxes3d) {
    std::array<float, 3> c{0.35f, 0.8f, 0.35f};  // legally parked
    if (box.category == Category::IPCCandidate)
      c = box.state == BoxState::ConfirmedIPC ? std::array<float, 3>{0.95f, 0.2f, 0.2f}
                                              : std::array<float, 3>{0.95f, 0.6f, 0.15f};
    const double ca = std::cos(box.yaw), sa = std::sin(box.yaw);
    const double hx = box.extents.x() / 2.0, hy = box.extents.y() / 2.0;
    std::array<std::pair<int, int>, 4> corners;
    const double sx[4] = {-hx, hx, hx, -hx};
    const double sy[4] = {-hy, -hy, hy, hy};
    for (int i = 0; i < 4; ++i)
      corners[i] = to_px(box.center.x() + ca * sx[i] - sa * sy[i],
                         box.center.y() + sa * sx[i] + ca * sy[i]);
    for (int i = 0; i < 4; ++i) {
      const auto [x0, y0] = corners[i];
      const auto [x1, y1] = corners[(i + 1) % 4];
      line(img, x0, y0, x1, y1, c);
    }
  }
  return img;
}

}  // namespace pvd
