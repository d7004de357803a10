#include "roomreg/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "roomreg/dense_linalg.hpp"
#include "roomreg/matrix_io.hpp"

namespace roomreg {
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::ofstream open(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_fields(const fs::path& dir, const std::string& prefix, const FemSpaces& s, const Vec& v,
                  const Vec& T) {
  fs::create_directories(dir);
  write_field_csv(dir / (prefix + "_vx.csv"), s.nodes, s.velocity_nodal(v, 0));
  write_field_csv(dir / (prefix + "_vy.csv"), s.nodes, s.velocity_nodal(v, 1));
  write_field_csv(dir / (prefix + "_theta.csv"), s.nodes, s.temperature_nodal(T));
}

void export_cascade(const fs::path& dir, const SparseCascade& c) {
  fs::create_directories(dir);
  write_matrix_market(dir / "E.mtx", c.sys.E);
  write_matrix_market(dir / "A.mtx", c.sys.A);
  write_matrix_market(dir / "B.mtx", c.sys.B);
  write_matrix_market(dir / "C.mtx", c.sys.C);
  write_matrix_market(dir / "Bd.mtx", c.sys.Bd);
  auto out = open(dir / "manifest.txt");
  const auto& L = c.layout;
  out << "states = " << L.total() << "\ninputs = " << c.sys.inputs() << "\noutputs = " << c.sys.outputs()
      << "\ndisturbances = " << c.sys.disturbances() << "\nplant_offset = " << L.plant
      << "\nplant_states = " << L.n_plant << "\ndynamic_plant_states = " << L.dynamic_plant
      << "\nactuator_offset = " << L.actuator << "\nactuator_states = " << L.n_actuator
      << "\nsensor_offset = " << L.sensor << "\nsensor_states = " << L.n_sensor << "\n";
}

// Newton histories are not part of the steady-state files; keep them next to
// the cached states so cached reruns report the same iteration counts.
void save_history(const fs::path& p, const std::string& key, const SteadyStateSequence& s) {
  std::ofstream out(p);
  out << "# key=" << key << "\n";
  for (double r : s.initial.history) out << "initial " << num(r) << "\n";
  for (double r : s.final.history) out << "final " << num(r) << "\n";
}

bool load_history(const fs::path& p, const std::string& key, SteadyStateSequence& s) {
  std::ifstream in(p);
  std::string line;
  if (!in || !std::getline(in, line) || line != "# key=" + key) return false;
  std::string stage;
  double r;
  while (in >> stage >> r) (stage == "initial" ? s.initial.history : s.final.history).push_back(r);
  return true;
}

void write_hautus(std::ostream& out, const char* side, const std::vector<HautusVerdict>& v) {
  for (const auto& h : v)
    out << side << ',' << h.lambda.real() << ',' << h.lambda.imag() << ',' << h.sigma_min << ','
        << h.threshold << ',' << (h.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace

Pipeline::Pipeline(RoomScenario scenario, PipelineOptions options)
    : scenario_(std::move(scenario)), options_(std::move(options)) {
  if (options_.mesh_override) {
    if (*options_.mesh_override < 2) throw std::invalid_argument("--mesh-override must be at least 2");
    scenario_.synthesis_n = scenario_.simulation_n = *options_.mesh_override;
  }
  if (options_.dt) scenario_.dt = *options_.dt;
  if (options_.t_end) scenario_.t_end = *options_.t_end;
  scenario_.validate();
}

void Pipeline::say(const std::string& msg) const {
  if (options_.log) *options_.log << msg << std::endl;
}

const PlantModel& Pipeline::model(int n) {
  auto& slot = models_[n];
  if (slot) return *slot;
  auto m = std::make_unique<PlantModel>();
  m->n = n;
  m->spaces = build_spaces(build_mesh(scenario_.geometry, n));
  m->forms = assemble_linear_forms(m->spaces, scenario_.params);

  const std::string key =
      scenario_hash(scenario_, {"geometry", "regions", "physics", "forcing", "newton"}) + "-n" +
      std::to_string(n);
  const fs::path cache = options_.out / "cache";
  const fs::path fi = cache / ("steady_n" + std::to_string(n) + "_initial.csv");
  const fs::path ff = cache / ("steady_n" + std::to_string(n) + "_final.csv");
  const fs::path fh = cache / ("steady_n" + std::to_string(n) + "_history.txt");
  bool loaded = false;
  if (options_.use_cache && fs::exists(fi) && fs::exists(ff)) {
    try {
      m->steady.initial = load_steady_state(fi, key);
      m->steady.final = load_steady_state(ff, key);
      loaded = load_history(fh, key, m->steady);
      if (loaded) say("steady state (n=" + std::to_string(n) + ") loaded from cache");
    } catch (const std::runtime_error&) {
      loaded = false;
    }
  }
  if (!loaded) {
    say("solving steady state (n=" + std::to_string(n) + ")");
    m->steady = two_stage_steady_state(m->spaces, m->forms, scenario_.initial_forcing_fields(),
                                       scenario_.forcing_fields(), scenario_.newton);
    if (options_.use_cache) {
      fs::create_directories(cache);
      save_steady_state(fi, m->steady.initial, key);
      save_steady_state(ff, m->steady.final, key);
      save_history(fh, key, m->steady);
    }
  }
  const InputMatrices in = assemble_boundary_inputs(m->spaces, scenario_.boundary_controls(),
                                                    scenario_.boundary_disturbances());
  const Mat C = assemble_observations(m->spaces, scenario_.observation_specs());
  m->plant = linearize(m->spaces, m->forms, m->steady.final, in, C);
  slot = std::move(m);
  return *slot;
}

SparseCascade Pipeline::simulation_cascade(const PlantModel& m, const SimulationVariant& v) const {
  ActuatorSensor as = scenario_.actuator_sensor;
  as.A_a *= v.actuator_scale;
  return couple_cascade(eliminate_pressure_penalty(m.plant, scenario_.penalty), as);
}

DenseCascade Pipeline::synthesis_cascade(const PlantModel& m) const {
  return couple_cascade(eliminate_pressure_nullspace(m.plant), scenario_.actuator_sensor);
}

Vec Pipeline::initial_state(const PlantModel& m, int total) const {
  const auto& p = m.plant;
  Vec x = Vec::Zero(total);
  const Vec v0 = m.steady.initial.w - m.steady.final.w;
  x.head(p.n_v) = v0;
  x.segment(p.n_v, p.n_t) = m.steady.initial.T - m.steady.final.T;
  // Consistent pressure for the constraint D v + eps M_p p = 0.
  Eigen::SimplicialLDLT<SpMat> mp(p.M_p);
  if (mp.info() != Eigen::Success) throw NumericalError("pressure mass matrix is singular");
  x.segment(p.n_v + p.n_t, p.n_p) = -mp.solve(p.D * v0) / scenario_.penalty;
  return x;
}

std::string Pipeline::controller_key() const {
  return scenario_hash(scenario_, {"geometry", "regions", "physics", "control", "disturbance",
                                   "observation", "forcing", "actuator", "sensor", "signals",
                                   "synthesis", "newton"}) +
         "-n" + std::to_string(scenario_.synthesis_n);
}

void Pipeline::steady() {
  const PlantModel& m = model(scenario_.simulation_n);
  const fs::path dir = options_.out / "steady";
  write_fields(dir, "steady", m.spaces, m.steady.final.w, m.steady.final.T);
  write_fields(dir, "initial_guess", m.spaces, m.steady.initial.w, m.steady.initial.T);
  auto out = open(dir / "newton.csv");
  out << "stage,iteration,residual\n";
  for (size_t k = 0; k < m.steady.initial.history.size(); ++k)
    out << "initial," << k << ',' << num(m.steady.initial.history[k]) << '\n';
  for (size_t k = 0; k < m.steady.final.history.size(); ++k)
    out << "final," << k << ',' << num(m.steady.final.history[k]) << '\n';
  say("steady state: " + std::to_string(m.steady.total_iterations()) + " Newton iterations, residual " +
      num(m.steady.final.residual_norm));
}

AnalysisResult Pipeline::analyze() {
  const PlantModel& m = model(scenario_.simulation_n);
  const PenaltyPlant pp = eliminate_pressure_penalty(m.plant, scenario_.penalty);
  const SparseCascade c = couple_cascade(pp, scenario_.actuator_sensor);
  AnalysisResult r;
  r.spectrum = unstable_spectrum(c, 0.0);
  r.assumptions = cascade_assumption_check(pp.sys, scenario_.actuator_sensor,
                                           scenario_.signal_spec.frequencies);
  r.detectability = hautus_check(c.sys.A, c.sys.E, c.sys.C, HautusSide::Detectability, r.spectrum.values());
  r.stabilizability =
      hautus_check(c.sys.A, c.sys.E, c.sys.B, HautusSide::Stabilizability, r.spectrum.values());

  const fs::path dir = options_.out / "analysis";
  fs::create_directories(dir);
  write_spectral_report(dir / "spectrum.csv", r.spectrum);
  write_spectral_report(dir / "plant_spectrum.csv", r.assumptions.plant_spectrum);
  write_assumption_report(dir / "assumptions.csv", r.assumptions);
  {
    auto out = open(dir / "hautus.csv");
    out.precision(12);
    out << "side,re,im,sigma_min,threshold,verdict\n";
    write_hautus(out, "detectability", r.detectability);
    write_hautus(out, "stabilizability", r.stabilizability);
  }
  export_cascade(dir / "cascade", c);
  std::ostringstream msg;
  msg << "analysis: " << r.spectrum.pairs.size() << " eigenvalues with Re > 0";
  for (const auto& p : r.spectrum.pairs) msg << " " << p.value;
  msg << "; assumptions " << (r.assumptions.all_pass() ? "PASS" : "FAIL");
  say(msg.str());
  return r;
}

SynthesisResult Pipeline::synthesize() {
  const PlantModel& m = model(scenario_.synthesis_n);
  say("synthesizing controller on the n=" + std::to_string(m.n) + " nullspace model");
  const DenseCascade c = synthesis_cascade(m);
  const InternalModel im = build_internal_model(scenario_.signal_spec);
  SynthesisResult res = synthesize_controller(c.sys, im, scenario_.signal_spec.frequencies, scenario_.synthesis);

  const Mat AL = c.sys.A + res.gains.L * c.sys.C;
  const Mat Acl = res.gains.Ac + res.gains.Bc * (Mat(res.gains.K1.rows(), res.gains.K1.cols() + res.gains.K2.cols())
                                                  << res.gains.K1, res.gains.K2).finished();
  const DenseClosedLoop cl = assemble_closed_loop(c, scenario_.actuator_sensor, res.controller);

  save_controller(controller_dir(), res.controller);
  {
    auto out = open(controller_dir() / "key.txt");
    out << controller_key() << '\n';
  }
  const fs::path dir = options_.out / "synthesis";
  auto out = open(dir / "report.txt");
  out.precision(12);
  out << "plant_order = " << c.sys.states() << "\n";
  out << "internal_model_dim = " << im.dim() << "\n";
  out << "reduced_order = " << res.controller.r << "\n";
  out << "controller_dim = " << res.controller.dim() << "\n";
  out << "filter_care_residual = " << res.gains.filter.relative_residual << "\n";
  out << "control_care_residual = " << res.gains.control.relative_residual << "\n";
  out << "observer_abscissa = " << spectral_abscissa(AL) << "\n";
  out << "state_feedback_abscissa = " << spectral_abscissa(Acl) << "\n";
  out << "truncation_bound = " << res.reduction.error_bound << "\n";
  out << "design_closed_loop_abscissa = " << spectral_abscissa(cl.A) << "\n";
  auto hk = open(dir / "hankel.csv");
  hk.precision(17);
  hk << "index,sigma\n";
  for (Eigen::Index i = 0; i < res.reduction.hankel.size(); ++i) hk << i + 1 << ',' << res.reduction.hankel[i] << '\n';
  say("controller dim Z = " + std::to_string(res.controller.dim()));
  return res;
}

SimulationResult Pipeline::simulate(const SimulationVariant& variant, bool write) {
  const ControllerRealization ctrl = load_controller(controller_dir());
  std::ifstream key(controller_dir() / "key.txt");
  std::string stored;
  if (key && std::getline(key, stored) && stored != controller_key())
    throw std::runtime_error("controller artifact is stale (scenario changed since synthesis)");
  return simulate_with(ctrl, variant, write);
}

SimulationResult Pipeline::simulate_with(const ControllerRealization& ctrl, const SimulationVariant& variant,
                                         bool write) {
  const PlantModel& m = model(scenario_.simulation_n);
  const SparseCascade c = simulation_cascade(m, variant);
  const SparseClosedLoop cl = assemble_closed_loop(c, scenario_.actuator_sensor, ctrl);
  ExogenousSignals sig = scenario_.signals;
  for (auto& d : sig.disturbance) d = d.scaled(variant.disturbance_scale);
  IntegrationOptions opt;
  opt.t_end = scenario_.t_end;
  opt.dt = scenario_.dt;
  opt.snapshot_times = scenario_.snapshot_times;
  say("simulating on the n=" + std::to_string(m.n) + " penalty model, dt=" + num(opt.dt));
  SimulationResult r;
  r.trajectory = integrate(cl, sig, initial_state(m, cl.states()), opt);
  const double T = scenario_.t_end;
  r.tail_window[0] = 0.8 * T;
  r.tail_window[1] = T;
  r.fit_window[0] = 0.1 * T;
  r.fit_window[1] = 0.9 * T;
  r.tail = error_metrics(r.trajectory, r.tail_window[0], r.tail_window[1]);
  r.decay = fit_error_decay(r.trajectory, r.fit_window[0], r.fit_window[1]);
  r.reference_sup = r.trajectory.y_ref.cwiseAbs().colwise().maxCoeff().transpose();

  if (write) {
    const fs::path dir = options_.out / "simulation";
    fs::create_directories(dir);
    write_trajectory_csv(dir / "trajectory.csv", r.trajectory);
    const auto& p = m.plant;
    for (size_t i = 0; i < r.trajectory.snapshots.size(); ++i) {
      const Vec& x = r.trajectory.snapshots[i];
      write_fields(dir, "snapshot_t" + num(r.trajectory.snapshot_times[i]), m.spaces, x.head(p.n_v),
                   x.segment(p.n_v, p.n_t));
    }
    auto out = open(dir / "summary.txt");
    out.precision(12);
    out << "method = " << r.trajectory.method << "\ndt = " << r.trajectory.dt << "\n";
    out << "tail_window = " << r.tail_window[0] << " " << r.tail_window[1] << "\n";
    for (Eigen::Index i = 0; i < r.tail.sup.size(); ++i)
      out << "tail_sup_e" << i + 1 << " = " << r.tail.sup[i] << "  (sup |y_ref" << i + 1
          << "| = " << r.reference_sup[i] << ")\n";
    out << "decay_rate = " << r.decay.rate << "\n";
  }
  say("simulation: decay rate " + num(r.decay.rate));
  return r;
}

void Pipeline::full(std::string* stage) {
  auto enter = [&](const char* name) {
    if (stage) *stage = name;
  };
  enter("steady");
  steady();
  enter("analyze");
  analyze();
  enter("synthesize");
  bool cached = false;
  if (options_.use_cache && fs::exists(controller_dir() / "manifest.txt")) {
    std::ifstream key(controller_dir() / "key.txt");
    std::string stored;
    cached = key && std::getline(key, stored) && stored == controller_key();
  }
  if (cached) say("controller loaded from cache");
  else synthesize();
  enter("simulate");
  simulate();
}

int run_command(const std::string& command, const RoomScenario& scenario, const PipelineOptions& options,
                std::ostream& err) {
  static const std::vector<std::string> known = {"steady", "analyze", "synthesize", "simulate", "full"};
  if (std::find(known.begin(), known.end(), command) == known.end()) {
    err << "unknown command '" << command << "' (steady, analyze, synthesize, simulate, full)\n";
    return 2;
  }
  std::string stage = "setup";
  try {
    Pipeline p(scenario, options);
    fs::create_directories(options.out);
    auto dump = open(options.out / "scenario.ini");
    dump << dump_scenario(p.scenario());
    dump.close();
    stage = command;
    if (command == "steady") p.steady();
    else if (command == "analyze") p.analyze();
    else if (command == "synthesize") p.synthesize();
    else if (command == "simulate") p.simulate();
    else p.full(&stage);
  } catch (const std::exception& e) {
    err << stage << " failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace roomreg
