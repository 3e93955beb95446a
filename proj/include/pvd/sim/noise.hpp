#pragma once

#include <cstdint>

namespace pvd {

// Multi-octave 2D value noise over world coordinates, output in [0,1].
// Quintic-smoothstep lattice interpolation keeps it C2, so bilinear
// resampling of rendered images stays accurate.
struct NoiseParams {
  std::uint64_t seed = 0;
  double base_wavelength = 3.0;  // meters
  int octaves = 4;
  double gain = 0.55;
  double lacunarity = 2.03;
};

double value_noise(double x, double y, const NoiseParams& p);

}  // namespace pvd
