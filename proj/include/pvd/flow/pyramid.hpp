#pragma once

#include <vector>

#include "pvd/core/grid.hpp"

namespace pvd {

// Feature channels at one scale.
struct PyramidLevel {
  Grid intensity, grad_x, grad_y;
};

// levels[0] is full resolution; each level halves (ceil) the previous one.
struct Pyramid {
  std::vector<PyramidLevel> levels;

  int num_levels() const { return static_cast<int>(levels.size()); }
};

// 2x2 average-pool chain with per-level central-difference gradients.
// Throws TooSmall when the coarsest level would drop below 8x8 and
// DomainError for levels < 2.
Pyramid build_pyramid(const Grid& image, int levels);

}  // namespace pvd
