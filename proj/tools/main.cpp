#include <iostream>

#include <CLI11.hpp>

#include "roomreg/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary feedback regulation of a ventilated room"};
  std::string command;
  std::string scenario_path;
  std::string out = "out";
  std::optional<int> mesh;
  std::optional<double> dt, t_end;
  bool no_cache = false, quiet = false;

  app.add_option("command", command, "steady | analyze | synthesize | simulate | full")
      ->required()
      ->check(CLI::IsMember({"steady", "analyze", "synthesize", "simulate", "full"}));
  app.add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--mesh-override", mesh, "subdivisions per unit length for both meshes");
  app.add_option("--dt", dt, "simulation time step");
  app.add_option("--t-end", t_end, "simulation horizon");
  app.add_flag("--no-cache", no_cache, "recompute cached steady states and controller");
  app.add_flag("-q,--quiet", quiet, "suppress progress messages");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  roomreg::RoomScenario scenario;
  try {
    scenario = roomreg::parse_scenario(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "scenario failed: " << e.what() << "\n";
    return 1;
  }
  roomreg::PipelineOptions opt;
  opt.out = out;
  opt.mesh_override = mesh;
  opt.dt = dt;
  opt.t_end = t_end;
  opt.use_cache = !no_cache;
  opt.log = quiet ? nullptr : &std::cerr;
  return roomreg::run_command(command, scenario, opt, std::cerr);
}
