#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvd/pipeline/pipeline.hpp"

namespace pvd {

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 0;
  SceneParams params;
};

// The 20-scene end-to-end benchmark: five scenes each of plain candidates,
// candidates that depart before the revisit, heavy moving traffic, and dense
// occlusion-prone mixes. Sized for a single core: short flights at reduced
// resolution, altitude low enough that every car carries a usable corner
// count.
std::vector<ScenarioSpec> benchmark_scenarios();

// Configuration the benchmark is tuned for (defaults everywhere; the seed is
// set per scenario by the caller).
PipelineConfig benchmark_config();

// One rendered pair per listed time: frame at t matched against t + frame_dt.
struct FlowCaseSpec {
  std::uint64_t seed = 0;
  SceneParams params;
  std::vector<double> times;
};

// 20 sequences at full resolution for the flow accuracy gate (endpoint error
// and outlier rate against rendered reference flow).
std::vector<FlowCaseSpec> flow_benchmark();

// 10 occlusion-heavy scenes for the offset-sampling ablation: dense fast
// traffic at half resolution, where the per-level search range is tight
// against the motion and sampling along the local motion model has to earn
// its keep. Scored over all pixels (reference flow is defined everywhere,
// occluded or not).
std::vector<FlowCaseSpec> ablation_benchmark();

}  // namespace pvd
