#include "pvd/pipeline/scenarios.hpp"

namespace pvd {

namespace {

// Shared geometry for the end-to-end scenes. Altitude is the lowest that
// keeps both parked rows inside the vertical field of view (with wobble
// margin); lower flight means more pixels per car and therefore more corners
// to re-identify with. Eight trajectory keyframes per pass keep a full
// two-pass scenario near ten seconds of single-core work.
SceneParams scenario_base() {
  SceneParams p;
  p.image_width = 480;
  p.image_height = 320;
  p.altitude = 14.0;
  p.speed = 2.5;
  p.fps = 5.0;
  p.duration = 1.4;
  p.mc_speed = 7.0;
  p.num_mc = 2;
  p.num_lpc = 2;
  p.num_ipc = 2;
  p.num_ipc_departing = 0;
  return p;
}

}  // namespace

std::vector<ScenarioSpec> benchmark_scenarios() {
  std::vector<ScenarioSpec> out;
  for (int i = 0; i < 5; ++i) {
    ScenarioSpec s{"ipc_present_" + std::to_string(i), 9000u + i, scenario_base()};
    out.push_back(s);
  }
  for (int i = 0; i < 5; ++i) {
    ScenarioSpec s{"ipc_departed_" + std::to_string(i), 9100u + i, scenario_base()};
    s.params.num_ipc_departing = 1;
    out.push_back(s);
  }
  for (int i = 0; i < 5; ++i) {
    ScenarioSpec s{"mc_heavy_" + std::to_string(i), 9200u + i, scenario_base()};
    s.params.num_mc = 5;
    s.params.num_ipc = 1;
    out.push_back(s);
  }
  for (int i = 0; i < 5; ++i) {
    ScenarioSpec s{"occlusion_" + std::to_string(i), 9300u + i, scenario_base()};
    s.params.num_mc = 4;
    s.params.mc_speed = 8.0;
    s.params.num_ipc_departing = 1;
    out.push_back(s);
  }
  return out;
}

PipelineConfig benchmark_config() {
  return PipelineConfig{};
}

std::vector<FlowCaseSpec> flow_benchmark() {
  std::vector<FlowCaseSpec> out;
  for (int i = 0; i < 20; ++i) {
    FlowCaseSpec c;
    c.seed = 100u + i;
    c.params = SceneParams{};
    c.params.num_mc = 2;
    c.params.num_lpc = 2;
    c.params.num_ipc = 2;
    c.times = {0.8, 2.6};
    out.push_back(c);
  }
  return out;
}

std::vector<FlowCaseSpec> ablation_benchmark() {
  std::vector<FlowCaseSpec> out;
  for (int i = 0; i < 10; ++i) {
    FlowCaseSpec c;
    c.seed = 300u + i;
    c.params = SceneParams{};
    c.params.image_width = 480;
    c.params.image_height = 270;
    c.params.num_mc = 6;
    c.params.num_lpc = 3;
    c.params.num_ipc = 2;
    c.params.mc_speed = 10.0;
    c.params.fps = 5.0;
    c.times = {0.8, 1.6};
    out.push_back(c);
  }
  return out;
}

}  // namespace pvd
