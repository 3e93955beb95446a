#include "pvd/flow/pyramid.hpp"

#include "pvd/core/errors.hpp"

namespace pvd {

Pyramid build_pyramid(const Grid& image, int levels) {
  if (levels < 2) throw DomainError("build_pyramid: need at least 2 levels");
  if (image.width <= 0 || image.height <= 0) throw DomainError("build_pyramid: empty image");
  {
    int w = image.width, h = image.height;
    for (int l = 1; l < levels; ++l) {
      w = (w + 1) / 2;
      h = (h + 1) / 2;
    }
    if (w < 8 || h < 8) throw TooSmall("build_pyramid: coarsest level below 8x8");
  }

  Pyramid pyr;
  Grid current = image;
  for (int l = 0; l < levels; ++l) {
    PyramidLevel level;
    level.grad_x = gradient_x(current);
    level.grad_y = gradient_y(current);
    level.intensity = current;
    pyr.levels.push_back(std::move(level));
    if (l + 1 < levels) current = downsample2x2(current);
  }
  return pyr;
}

}  // namespace pvd
