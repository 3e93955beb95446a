#include "pvd/sim/noise.hpp"

#include <cmath>

#include "pvd/core/rng.hpp"

namespace pvd {

namespace {

inline double lattice_value(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  const std::uint64_t h = mix64(static_cast<std::uint64_t>(ix) * 0x8da6b343ULL ^
                                static_cast<std::uint64_t>(iy) * 0xd8163841ULL ^ seed);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double octave(double x, double y, std::uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = fade(x - fx), ty = fade(y - fy);
  const double v00 = lattice_value(ix, iy, seed);
  const double v10 = lattice_value(ix + 1, iy, seed);
  const double v01 = lattice_value(ix, iy + 1, seed);
  const double v11 = lattice_value(ix + 1, iy + 1, seed);
  return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

}  // namespace

double value_noise(double x, double y, const NoiseParams& p) {
  double sum = 0.0, amp = 1.0, total = 0.0;
  double freq = 1.0 / p.base_wavelength;
  for (int o = 0; o < p.octaves; ++o) {
    sum += amp * octave(x * freq, y * freq, hash_combine(p.seed, static_cast<std::uint64_t>(o)));
    total += amp;
    amp *= p.gain;
    freq *= p.lacunarity;
  }
  return sum / total;
}

}  // namespace pvd
