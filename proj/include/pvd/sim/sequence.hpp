#pragma once

#include <filesystem>
#include <vector>

#include "pvd/sim/render.hpp"

namespace pvd {

// A rendered flight: one FrameTruth per trajectory keyframe.
struct Sequence {
  SceneModel scene;
  std::vector<FrameTruth> frames;
};

// with_ground_truth_flow=false skips the (expensive) dense reference flow and
// leaves each frame's flow field empty; poses, images, boxes and tracks are
// always filled.
Sequence render_sequence(const SceneModel& scene, bool with_ground_truth_flow = true);

// Layout: scene.json, frame_%05d.pgm, flow_%05d.flo, truth_%05d.json.
// Images are quantized to 8 bits on disk.
void write_sequence(const Sequence& seq, const std::filesystem::path& dir);
Sequence read_sequence(const std::filesystem::path& dir);

Json truth_to_json(const FrameTruth& ft);
FrameTruth truth_from_json(const Json& j);

}  // namespace pvd
