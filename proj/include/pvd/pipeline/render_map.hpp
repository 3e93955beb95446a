#pragma once

#include "pvd/io/image_io.hpp"
#include "pvd/slam/map.hpp"

namespace pvd {

// Top-down view of the mapped world: map points (ground gray, car-tagged
// tinted), the keyframe track, and 3D boxes colour-coded by category and
// state (confirmed red, candidate orange, legally parked green). Bounds fit
// the content with a margin.
RgbImage render_map_image(const WorldMap& map, double pixels_per_meter = 6.0);

}  // namespace pvd
