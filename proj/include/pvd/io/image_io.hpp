#pragma once

#include <array>
#include <string>

#include "pvd/core/grid.hpp"

namespace pvd {

// 8-bit binary PGM (P5); intensities clamped to [0,1].
void write_pgm(const std::string& path, const Grid& image);
Grid read_pgm(const std::string& path);

// 8-bit binary PPM (P6); rgb channel values in [0,1].
struct RgbImage {
  int width = 0, height = 0;
  std::vector<std::array<float, 3>> pixels;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, {0, 0, 0}) {}
  std::array<float, 3>& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  const std::array<float, 3>& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};
void write_ppm(const std::string& path, const RgbImage& image);

}  // namespace pvd
