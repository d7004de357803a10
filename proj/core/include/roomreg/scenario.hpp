#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roomreg/assembly.hpp"
#include "roomreg/cascade.hpp"
#include "roomreg/controller.hpp"
#include "roomreg/expression.hpp"
#include "roomreg/mesh.hpp"
#include "roomreg/signals.hpp"
#include "roomreg/steady_state.hpp"

namespace roomreg {

/// Schema violations and invariant failures while reading a scenario.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct InputChannel {
  std::string region;
  Component component = Component::VelocityX;
  Expression shape;
  bool operator==(const InputChannel&) const = default;
};

struct ObservationChannel {
  std::string region;
  Component component = Component::Temperature;
  Expression weight = Expression::constant(1.0);
  bool operator==(const ObservationChannel&) const = default;
};

struct ForcingSpec {
  Expression fx, fy, fT;
  bool operator==(const ForcingSpec&) const = default;
};

struct RoomScenario {
  std::string name = "scenario";
  RoomGeometry geometry;
  PhysicalParams params;
  std::vector<InputChannel> controls;
  std::vector<InputChannel> disturbances;
  std::vector<ObservationChannel> observations;
  ForcingSpec forcing;
  ForcingSpec initial_forcing;
  ActuatorSensor actuator_sensor;
  SignalSpec signal_spec;
  ExogenousSignals signals;
  SynthesisParams synthesis;
  NewtonOptions newton;
  int synthesis_n = 16;
  int simulation_n = 16;
  double penalty = 1e-5;
  double t_end = 50.0;
  double dt = 1e-2;
  std::vector<double> snapshot_times{50.0};

  int inputs() const { return static_cast<int>(controls.size()); }
  int outputs() const { return static_cast<int>(observations.size()); }

  /// Throws ScenarioError naming the violated invariant.
  void validate() const;

  std::vector<BoundaryInput> boundary_controls() const;
  std::vector<BoundaryInput> boundary_disturbances() const;
  std::vector<ObservationSpec> observation_specs() const;
  ForcingFields forcing_fields() const;
  ForcingFields initial_forcing_fields() const;
};

bool operator==(const RoomScenario& a, const RoomScenario& b);

/// INI file with sections [scenario] [geometry] [regions] [physics]
/// [control_k] [disturbance_k] [observation_k] [forcing] [actuator] [sensor]
/// [signals] [synthesis] [mesh] [simulation] [newton]. Unknown sections or
/// keys are schema errors; omitted optional fields take their defaults.
RoomScenario parse_scenario(const std::filesystem::path& path);
RoomScenario parse_scenario_text(const std::string& text);

/// Normalized dump with every default filled in; parses back to an equal
/// scenario.
std::string dump_scenario(const RoomScenario& s);

/// SHA-256 (hex) of the named sections of the normalized dump.
std::string scenario_hash(const RoomScenario& s, const std::vector<std::string>& sections);

std::string sha256_hex(const std::string& data);

}  // namespace roomreg
