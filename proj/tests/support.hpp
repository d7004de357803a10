#pragma once

#include <filesystem>
#include <random>

#include "roomreg/pipeline.hpp"

namespace roomreg::test {

inline std::filesystem::path scenario_path() {
  return std::filesystem::path(ROOMREG_SCENARIO_DIR) / "ventilated_room.ini";
}

inline std::filesystem::path artifacts(const std::string& sub) {
  return std::filesystem::path(ROOMREG_TEST_ARTIFACTS) / sub;
}

inline RoomScenario room() { return parse_scenario(scenario_path()); }

/// One pipeline per process over the shared artifact directory, so steady
/// states and the controller are computed once per build tree.
inline Pipeline& reference_pipeline() {
  static Pipeline p = [] {
    PipelineOptions o;
    o.out = artifacts("reference");
    return Pipeline(room(), o);
  }();
  return p;
}

/// Coarse plant linearized at rest: Stokes flow, diffusion and buoyancy
/// with the reference boundary inputs and observations.
struct CoarseModel {
  FemSpaces spaces;
  LinearForms forms;
  SaddlePointPlant plant;
};

inline CoarseModel coarse_model(int n = 8) {
  const RoomScenario s = room();
  CoarseModel m;
  m.spaces = build_spaces(build_mesh(s.geometry, n));
  m.forms = assemble_linear_forms(m.spaces, s.params);
  const InputMatrices in =
      assemble_boundary_inputs(m.spaces, s.boundary_controls(), s.boundary_disturbances());
  m.plant = linearize(m.spaces, m.forms, SteadyState::zero(m.spaces), in,
                      assemble_observations(m.spaces, s.observation_specs()));
  return m;
}

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = d(rng);
  return m;
}

}  // namespace roomreg::test
