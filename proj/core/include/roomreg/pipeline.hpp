#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "roomreg/closed_loop.hpp"
#include "roomreg/controller.hpp"
#include "roomreg/scenario.hpp"
#include "roomreg/system_analysis.hpp"

namespace roomreg {

struct PipelineOptions {
  std::filesystem::path out = "out";
  std::optional<int> mesh_override;  // replaces both mesh subdivision counts
  std::optional<double> dt, t_end;
  std::ostream* log = nullptr;
  bool use_cache = true;
};

/// Discretization, steady states and linearized plant on one mesh.
struct PlantModel {
  int n = 0;
  FemSpaces spaces;
  LinearForms forms;
  SteadyStateSequence steady;
  SaddlePointPlant plant;
};

struct AnalysisResult {
  SpectralReport spectrum;  // cascade, penalty elimination
  AssumptionReport assumptions;
  std::vector<HautusVerdict> detectability, stabilizability;
};

struct SimulationVariant {
  double actuator_scale = 1.0;     // A_a <- scale * A_a in the simulated plant
  double disturbance_scale = 1.0;  // u_d <- scale * u_d
};

struct SimulationResult {
  ClosedLoopTrajectory trajectory;
  ErrorMetrics tail;     // last fifth of the horizon
  ExponentialFit decay;  // fitted on [0.1, 0.9] of the horizon
  double tail_window[2] = {0.0, 0.0};
  double fit_window[2] = {0.0, 0.0};
  Vec reference_sup;     // sup |y_ref,i| over the horizon
};

class Pipeline {
 public:
  Pipeline(RoomScenario scenario, PipelineOptions options);

  const RoomScenario& scenario() const { return scenario_; }
  const PipelineOptions& options() const { return options_; }
  std::filesystem::path controller_dir() const { return options_.out / "controller"; }

  /// Cached per mesh; steady states are also cached on disk.
  const PlantModel& model(int n);

  void steady();
  AnalysisResult analyze();
  SynthesisResult synthesize();
  /// Loads the controller written by synthesize(); throws
  /// "controller artifact missing" when there is none.
  SimulationResult simulate(const SimulationVariant& variant = {}, bool write = true);
  SimulationResult simulate_with(const ControllerRealization& ctrl, const SimulationVariant& variant,
                                 bool write);
  /// Chains all stages; the controller is reused when its key matches.
  /// `stage`, if given, tracks the stage being run.
  void full(std::string* stage = nullptr);

  /// Physical initial state of the simulation plant (penalty layout
  /// [v; th; p] with a consistent pressure) followed by zeros.
  Vec initial_state(const PlantModel& m, int total) const;
  SparseCascade simulation_cascade(const PlantModel& m, const SimulationVariant& variant) const;
  DenseCascade synthesis_cascade(const PlantModel& m) const;
  std::string controller_key() const;

 private:
  void say(const std::string& msg) const;

  RoomScenario scenario_;
  PipelineOptions options_;
  std::map<int, std::unique_ptr<PlantModel>> models_;
};

/// Runs steady | analyze | synthesize | simulate | full. Returns 0 on success;
/// on failure prints "<stage> failed: <cause>" to `err` and returns 1
/// (2 for an unknown command).
int run_command(const std::string& command, const RoomScenario& scenario,
                const PipelineOptions& options, std::ostream& err);

}  // namespace roomreg
