#include "roomreg/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

namespace roomreg {
namespace {

using boost::property_tree::ptree;

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

[[noreturn]] void schema(const std::string& field, const std::string& what) {
  throw ScenarioError("schema error: " + field + ": " + what);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

double scalar(const std::string& text, const std::string& field) {
  try {
    return Expression::parse(text)(0.0, 0.0, 0.0);
  } catch (const std::invalid_argument& e) {
    schema(field, e.what());
  }
}

std::vector<double> numbers(const std::string& text, const std::string& field) {
  std::vector<double> v;
  for (const auto& w : words(text)) v.push_back(scalar(w, field));
  return v;
}

Mat matrix(const std::string& text, const std::string& field) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    if (trim(row).empty()) continue;
    rows.push_back(numbers(row, field));
  }
  if (rows.empty()) return Mat();
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) schema(field, "matrix rows have different lengths");
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::string matrix_text(const Mat& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? " " : "") + num(m(i, j));
  }
  return s;
}

Side side_from(const std::string& s, const std::string& field) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  if (s == "bottom") return Side::Bottom;
  if (s == "top") return Side::Top;
  schema(field, "unknown side '" + s + "' (left, right, bottom, top)");
}

const char* side_name(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

BoundaryInterval interval(const std::string& text, const std::string& field) {
  const auto w = words(text);
  if (w.size() != 3) schema(field, "expected '<side> <start> <end>'");
  return {side_from(w[0], field), scalar(w[1], field), scalar(w[2], field)};
}

std::string interval_text(const BoundaryInterval& b) {
  return std::string(side_name(b.side)) + " " + num(b.start) + " " + num(b.end);
}

Expression expression(const std::string& text, const std::string& field) {
  try {
    return Expression::parse(text);
  } catch (const std::invalid_argument& e) {
    schema(field, e.what());
  }
}

Component component(const std::string& text, const std::string& field) {
  try {
    return component_from_string(trim(text));
  } catch (const std::invalid_argument& e) {
    schema(field, e.what());
  }
}

// Reads the keys of one section, rejecting any key not in `allowed`.
class Section {
 public:
  Section(const ptree* tree, std::string name, std::set<std::string> allowed)
      : tree_(tree), name_(std::move(name)) {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!allowed.count(key)) schema(name_ + "." + key, "unknown field");
      if (!child.empty()) schema(name_ + "." + key, "nested values are not supported");
    }
  }
  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }
  std::string get(const std::string& key) const { return trim(tree_->get_child(key).data()); }
  std::string field(const std::string& key) const { return name_ + "." + key; }
  std::string require(const std::string& key) const {
    if (!has(key)) throw ScenarioError("schema error: missing required field " + field(key));
    return get(key);
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? scalar(get(key), field(key)) : fallback;
  }
  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = scalar(get(key), field(key));
    if (v != static_cast<int>(v)) schema(field(key), "expected an integer");
    return static_cast<int>(v);
  }

 private:
  const ptree* tree_;
  std::string name_;
};

const ptree* child(const ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

// Sections named prefix_1 ... prefix_K, in order.
std::vector<const ptree*> numbered(const ptree& root, const std::string& prefix) {
  std::map<int, const ptree*> found;
  for (const auto& [key, sub] : root) {
    if (key.rfind(prefix + "_", 0) != 0) continue;
    const std::string idx = key.substr(prefix.size() + 1);
    int k = 0;
    const auto r = std::from_chars(idx.data(), idx.data() + idx.size(), k);
    if (r.ec != std::errc() || r.ptr != idx.data() + idx.size() || k < 1)
      schema(key, "section index must be a positive integer");
    found[k] = &sub;
  }
  std::vector<const ptree*> out;
  int expect = 1;
  for (const auto& [k, sub] : found) {
    if (k != expect) schema(prefix + "_" + std::to_string(expect), "missing section");
    out.push_back(sub);
    ++expect;
  }
  return out;
}

InputChannel input_channel(const ptree* t, const std::string& name) {
  Section s(t, name, {"region", "component", "shape"});
  InputChannel c;
  c.region = s.require("region");
  c.component = component(s.require("component"), s.field("component"));
  c.shape = expression(s.require("shape"), s.field("shape"));
  return c;
}

bool same(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

const char* component_key(Component c) { return to_string(c); }

}  // namespace

void RoomScenario::validate() const {
  auto wrap = [](auto&& f) {
    try {
      f();
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
  };
  wrap([&] { geometry.validate(); });
  wrap([&] { params.validate(); });
  if (controls.empty()) throw ScenarioError("at least one control input is required");
  if (observations.empty()) throw ScenarioError("at least one observation is required");
  const auto is_boundary = [&](const std::string& r) {
    return r == "inlet" || r == "outlet" || r == "heater" || geometry.boundary_regions.count(r);
  };
  for (const auto& c : controls)
    if (!is_boundary(c.region)) throw ScenarioError("control region '" + c.region + "' is not a boundary region");
  for (const auto& c : disturbances)
    if (!is_boundary(c.region))
      throw ScenarioError("disturbance region '" + c.region + "' is not a boundary region");
  for (const auto& o : observations)
    if (!is_boundary(o.region) && !geometry.domain_regions.count(o.region))
      throw ScenarioError("observation region '" + o.region + "' is not defined");
  const int m = static_cast<int>(actuator_sensor.B_a.cols());
  const int p = static_cast<int>(actuator_sensor.C_s.rows());
  wrap([&] { actuator_sensor.validate(inputs(), outputs()); });
  if (m < p)
    throw ScenarioError("inputs must at least match outputs (" + std::to_string(m) + " inputs, " +
                        std::to_string(p) + " outputs)");
  if (signal_spec.p != p) throw ScenarioError("signal output dimension differs from the sensor outputs");
  wrap([&] { signal_spec.validate(); });
  wrap([&] { signals.validate(signal_spec); });
  if (signals.disturbance.size() != disturbances.size())
    throw ScenarioError("need one disturbance signal per disturbance channel");
  if (synthesis.alpha1 < 0.0 || synthesis.alpha2 < 0.0)
    throw ScenarioError("synthesis.alpha1 and synthesis.alpha2 must be non-negative");
  if (synthesis.order < 0) throw ScenarioError("synthesis.order must be non-negative");
  auto spd = [](const Mat& R, int n, const char* name) {
    if (R.size() == 0) return;
    if (R.rows() != n || R.cols() != n || !R.isApprox(R.transpose()) ||
        Eigen::LLT<Mat>(R).info() != Eigen::Success)
      throw ScenarioError(std::string(name) + " must be symmetric positive definite of size " +
                          std::to_string(n));
  };
  spd(synthesis.R1, p, "synthesis.R1");
  spd(synthesis.R2, m, "synthesis.R2");
  if (synthesis_n < 2 || simulation_n < 2) throw ScenarioError("mesh subdivisions must be at least 2");
  if (!(penalty > 0.0)) throw ScenarioError("mesh.penalty must be positive");
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw ScenarioError("simulation needs dt > 0 and t_end >= 0");
  if (!(newton.tol > 0.0) || newton.max_iter < 1) throw ScenarioError("newton needs tol > 0 and max_iter >= 1");
}

std::vector<BoundaryInput> RoomScenario::boundary_controls() const {
  std::vector<BoundaryInput> out;
  for (const auto& c : controls) out.push_back({c.region, c.component, [e = c.shape](const Eigen::Vector2d& p) { return e(p); }});
  return out;
}

std::vector<BoundaryInput> RoomScenario::boundary_disturbances() const {
  std::vector<BoundaryInput> out;
  for (const auto& c : disturbances) out.push_back({c.region, c.component, [e = c.shape](const Eigen::Vector2d& p) { return e(p); }});
  return out;
}

std::vector<ObservationSpec> RoomScenario::observation_specs() const {
  std::vector<ObservationSpec> out;
  for (const auto& o : observations) {
    ObservationSpec s{o.region, o.component, {}};
    if (!(o.weight == Expression::constant(1.0)))
      s.weight = [e = o.weight](const Eigen::Vector2d& p) { return e(p); };
    out.push_back(s);
  }
  return out;
}

namespace {
ForcingFields fields(const ForcingSpec& f) {
  return {[e = f.fx](const Eigen::Vector2d& p) { return e(p); },
          [e = f.fy](const Eigen::Vector2d& p) { return e(p); },
          [e = f.fT](const Eigen::Vector2d& p) { return e(p); }};
}
}  // namespace

ForcingFields RoomScenario::forcing_fields() const { return fields(forcing); }
ForcingFields RoomScenario::initial_forcing_fields() const { return fields(initial_forcing); }

bool operator==(const RoomScenario& a, const RoomScenario& b) {
  const auto& x = a.actuator_sensor;
  const auto& y = b.actuator_sensor;
  const auto& s = a.synthesis;
  const auto& t = b.synthesis;
  return a.name == b.name && a.geometry == b.geometry && a.params == b.params &&
         a.controls == b.controls && a.disturbances == b.disturbances &&
         a.observations == b.observations && a.forcing == b.forcing &&
         a.initial_forcing == b.initial_forcing && same(x.A_a, y.A_a) && same(x.B_a, y.B_a) &&
         same(x.C_a, y.C_a) && same(x.A_s, y.A_s) && same(x.B_s, y.B_s) && same(x.C_s, y.C_s) &&
         a.signal_spec == b.signal_spec && a.signals == b.signals && s.alpha1 == t.alpha1 &&
         s.alpha2 == t.alpha2 && s.order == t.order && same(s.R1, t.R1) && same(s.R2, t.R2) &&
         same(s.Q0, t.Q0) && a.newton.tol == b.newton.tol &&
         a.newton.max_iter == b.newton.max_iter && a.synthesis_n == b.synthesis_n &&
         a.simulation_n == b.simulation_n && a.penalty == b.penalty && a.t_end == b.t_end &&
         a.dt == b.dt && a.snapshot_times == b.snapshot_times;
}

RoomScenario parse_scenario_text(const std::string& text) {
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ScenarioError(std::string("schema error: ") + e.message() + " (line " +
                        std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> fixed = {"scenario", "geometry", "regions", "physics", "forcing",
                                               "actuator", "sensor", "signals", "synthesis", "mesh",
                                               "simulation", "newton"};
  for (const auto& [key, sub] : root) {
    if (sub.empty() && !sub.data().empty()) schema(key, "value outside of a section");
    const bool indexed = key.rfind("control_", 0) == 0 || key.rfind("disturbance_", 0) == 0 ||
                         key.rfind("observation_", 0) == 0;
    if (!fixed.count(key) && !indexed) schema(key, "unknown section");
  }

  RoomScenario s;
  {
    Section sec(child(root, "scenario"), "scenario", {"name"});
    if (sec.has("name")) s.name = sec.get("name");
  }
  {
    Section sec(child(root, "geometry"), "geometry", {"length_x", "length_y", "inlet", "outlet", "heater"});
    const RoomGeometry ref = reference_room();
    s.geometry.length_x = sec.number("length_x", 1.0);
    s.geometry.length_y = sec.number("length_y", 1.0);
    s.geometry.inlet = sec.has("inlet") ? interval(sec.get("inlet"), sec.field("inlet")) : ref.inlet;
    s.geometry.outlet = sec.has("outlet") ? interval(sec.get("outlet"), sec.field("outlet")) : ref.outlet;
    s.geometry.heater = sec.has("heater") ? interval(sec.get("heater"), sec.field("heater")) : ref.heater;
  }
  if (const ptree* r = child(root, "regions")) {
    for (const auto& [key, val] : *r) {
      const std::string field = "regions." + key;
      const auto w = words(val.data());
      if (w.size() == 5 && w[0] == "rect") {
        s.geometry.domain_regions[key] = {scalar(w[1], field), scalar(w[2], field),
                                          scalar(w[3], field), scalar(w[4], field)};
      } else if (w.size() == 4 && w[0] == "boundary") {
        s.geometry.boundary_regions[key] = {side_from(w[1], field), scalar(w[2], field),
                                            scalar(w[3], field)};
      } else {
        schema(field, "expected 'rect x0 x1 y0 y1' or 'boundary <side> <start> <end>'");
      }
    }
  }
  {
    Section sec(child(root, "physics"), "physics", {"Re", "Gr", "Pr", "alpha_v", "alpha_theta"});
    s.params.Re = sec.number("Re", s.params.Re);
    s.params.Gr = sec.number("Gr", s.params.Re * s.params.Re / 0.9);
    s.params.Pr = sec.number("Pr", s.params.Pr);
    s.params.alpha_v = sec.number("alpha_v", s.params.alpha_v);
    s.params.alpha_theta = sec.number("alpha_theta", s.params.alpha_theta);
  }
  const auto controls = numbered(root, "control");
  for (size_t k = 0; k < controls.size(); ++k)
    s.controls.push_back(input_channel(controls[k], "control_" + std::to_string(k + 1)));
  const auto dists = numbered(root, "disturbance");
  for (size_t k = 0; k < dists.size(); ++k)
    s.disturbances.push_back(input_channel(dists[k], "disturbance_" + std::to_string(k + 1)));
  const auto obs = numbered(root, "observation");
  for (size_t k = 0; k < obs.size(); ++k) {
    Section sec(obs[k], "observation_" + std::to_string(k + 1), {"region", "component", "weight"});
    ObservationChannel o;
    o.region = sec.require("region");
    o.component = component(sec.require("component"), sec.field("component"));
    if (sec.has("weight")) o.weight = expression(sec.get("weight"), sec.field("weight"));
    s.observations.push_back(o);
  }
  {
    Section sec(child(root, "forcing"), "forcing",
                {"fx", "fy", "fT", "fx_initial", "fy_initial", "fT_initial"});
    auto ex = [&](const char* key) {
      return sec.has(key) ? expression(sec.get(key), sec.field(key)) : Expression::constant(0.0);
    };
    s.forcing = {ex("fx"), ex("fy"), ex("fT")};
    s.initial_forcing = {ex("fx_initial"), ex("fy_initial"), ex("fT_initial")};
  }
  {
    const int mb = s.inputs(), pb = s.outputs();
    Section a(child(root, "actuator"), "actuator", {"A", "B", "C"});
    Section z(child(root, "sensor"), "sensor", {"A", "B", "C"});
    const ActuatorSensor def = ActuatorSensor::identity_lag(mb, pb);
    auto mat = [](const Section& sec, const char* key, const Mat& fallback) {
      return sec.has(key) ? matrix(sec.get(key), sec.field(key)) : fallback;
    };
    s.actuator_sensor.A_a = mat(a, "A", def.A_a);
    s.actuator_sensor.B_a = mat(a, "B", def.B_a);
    s.actuator_sensor.C_a = mat(a, "C", def.C_a);
    s.actuator_sensor.A_s = mat(z, "A", def.A_s);
    s.actuator_sensor.B_s = mat(z, "B", def.B_s);
    s.actuator_sensor.C_s = mat(z, "C", def.C_s);
  }
  {
    std::set<std::string> allowed{"frequencies", "orders"};
    if (const ptree* t = child(root, "signals"))
      for (const auto& [key, val] : *t)
        if (key.rfind("reference_", 0) == 0 || key.rfind("disturbance_", 0) == 0) allowed.insert(key);
    Section sec(child(root, "signals"), "signals", allowed);
    s.signal_spec.frequencies = numbers(sec.require("frequencies"), sec.field("frequencies"));
    if (s.signal_spec.frequencies.empty()) schema(sec.field("frequencies"), "must not be empty");
    if (sec.has("orders")) {
      for (double o : numbers(sec.get("orders"), sec.field("orders"))) s.signal_spec.orders.push_back(static_cast<int>(o));
    } else {
      s.signal_spec.orders.assign(s.signal_spec.frequencies.size(), 1);
    }
    s.signal_spec.p = static_cast<int>(s.actuator_sensor.C_s.rows());
    auto signal = [&](const std::string& key) {
      if (!sec.has(key)) return ScalarSignal{};
      try {
        return parse_signal(sec.get(key));
      } catch (const std::invalid_argument& e) {
        schema(sec.field(key), e.what());
      }
    };
    for (int i = 1; i <= s.signal_spec.p; ++i) s.signals.reference.push_back(signal("reference_" + std::to_string(i)));
    for (size_t i = 1; i <= s.disturbances.size(); ++i)
      s.signals.disturbance.push_back(signal("disturbance_" + std::to_string(i)));
    for (const auto& key : allowed) {
      const auto under = key.find('_');
      if (under == std::string::npos) continue;
      const int idx = std::atoi(key.c_str() + under + 1);
      const bool ref = key.rfind("reference_", 0) == 0;
      const int limit = ref ? s.signal_spec.p : static_cast<int>(s.disturbances.size());
      if (idx < 1 || idx > limit) schema(sec.field(key), "no matching channel");
    }
  }
  {
    Section sec(child(root, "synthesis"), "synthesis", {"alpha1", "alpha2", "order", "R1", "R2", "Q0"});
    s.synthesis.alpha1 = sec.number("alpha1", s.synthesis.alpha1);
    s.synthesis.alpha2 = sec.number("alpha2", s.synthesis.alpha2);
    s.synthesis.order = sec.integer("order", s.synthesis.order);
    if (sec.has("R1")) s.synthesis.R1 = matrix(sec.get("R1"), sec.field("R1"));
    if (sec.has("R2")) s.synthesis.R2 = matrix(sec.get("R2"), sec.field("R2"));
    if (sec.has("Q0")) s.synthesis.Q0 = matrix(sec.get("Q0"), sec.field("Q0"));
  }
  {
    Section sec(child(root, "mesh"), "mesh", {"synthesis_n", "simulation_n", "penalty"});
    s.synthesis_n = sec.integer("synthesis_n", s.synthesis_n);
    s.simulation_n = sec.integer("simulation_n", s.simulation_n);
    s.penalty = sec.number("penalty", s.penalty);
  }
  {
    Section sec(child(root, "simulation"), "simulation", {"t_end", "dt", "snapshot_times"});
    s.t_end = sec.number("t_end", s.t_end);
    s.dt = sec.number("dt", s.dt);
    if (sec.has("snapshot_times")) s.snapshot_times = numbers(sec.get("snapshot_times"), sec.field("snapshot_times"));
  }
  {
    Section sec(child(root, "newton"), "newton", {"tol", "max_iter"});
    s.newton.tol = sec.number("tol", s.newton.tol);
    s.newton.max_iter = sec.integer("max_iter", s.newton.max_iter);
  }
  s.validate();
  return s;
}

RoomScenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

namespace {

std::map<std::string, std::string> render(const RoomScenario& s) {
  std::map<std::string, std::string> out;
  auto list = [](const std::vector<double>& v) {
    std::string r;
    for (size_t i = 0; i < v.size(); ++i) r += (i ? " " : "") + num(v[i]);
    return r;
  };
  out["scenario"] = "[scenario]\nname = " + s.name + "\n";
  out["geometry"] = "[geometry]\nlength_x = " + num(s.geometry.length_x) +
                    "\nlength_y = " + num(s.geometry.length_y) +
                    "\ninlet = " + interval_text(s.geometry.inlet) +
                    "\noutlet = " + interval_text(s.geometry.outlet) +
                    "\nheater = " + interval_text(s.geometry.heater) + "\n";
  std::string r = "[regions]\n";
  for (const auto& [name, rect] : s.geometry.domain_regions)
    r += name + " = rect " + num(rect.x0) + " " + num(rect.x1) + " " + num(rect.y0) + " " + num(rect.y1) + "\n";
  for (const auto& [name, b] : s.geometry.boundary_regions) r += name + " = boundary " + interval_text(b) + "\n";
  out["regions"] = r;
  out["physics"] = "[physics]\nRe = " + num(s.params.Re) + "\nGr = " + num(s.params.Gr) +
                   "\nPr = " + num(s.params.Pr) + "\nalpha_v = " + num(s.params.alpha_v) +
                   "\nalpha_theta = " + num(s.params.alpha_theta) + "\n";
  auto channels = [](const std::vector<InputChannel>& v, const std::string& prefix) {
    std::string t;
    for (size_t k = 0; k < v.size(); ++k)
      t += "[" + prefix + "_" + std::to_string(k + 1) + "]\nregion = " + v[k].region +
           "\ncomponent = " + component_key(v[k].component) + "\nshape = " + v[k].shape.text() + "\n";
    return t;
  };
  out["control"] = channels(s.controls, "control");
  out["disturbance"] = channels(s.disturbances, "disturbance");
  std::string o;
  for (size_t k = 0; k < s.observations.size(); ++k)
    o += "[observation_" + std::to_string(k + 1) + "]\nregion = " + s.observations[k].region +
         "\ncomponent = " + component_key(s.observations[k].component) +
         "\nweight = " + s.observations[k].weight.text() + "\n";
  out["observation"] = o;
  out["forcing"] = "[forcing]\nfx = " + s.forcing.fx.text() + "\nfy = " + s.forcing.fy.text() +
                   "\nfT = " + s.forcing.fT.text() + "\nfx_initial = " + s.initial_forcing.fx.text() +
                   "\nfy_initial = " + s.initial_forcing.fy.text() +
                   "\nfT_initial = " + s.initial_forcing.fT.text() + "\n";
  const auto& as = s.actuator_sensor;
  out["actuator"] = "[actuator]\nA = " + matrix_text(as.A_a) + "\nB = " + matrix_text(as.B_a) +
                    "\nC = " + matrix_text(as.C_a) + "\n";
  out["sensor"] = "[sensor]\nA = " + matrix_text(as.A_s) + "\nB = " + matrix_text(as.B_s) +
                  "\nC = " + matrix_text(as.C_s) + "\n";
  std::string g = "[signals]\nfrequencies = " + list(s.signal_spec.frequencies) + "\norders =";
  for (int k : s.signal_spec.orders) g += " " + std::to_string(k);
  g += "\n";
  for (size_t i = 0; i < s.signals.reference.size(); ++i)
    g += "reference_" + std::to_string(i + 1) + " = " + s.signals.reference[i].text() + "\n";
  for (size_t i = 0; i < s.signals.disturbance.size(); ++i)
    g += "disturbance_" + std::to_string(i + 1) + " = " + s.signals.disturbance[i].text() + "\n";
  out["signals"] = g;
  std::string y = "[synthesis]\nalpha1 = " + num(s.synthesis.alpha1) + "\nalpha2 = " + num(s.synthesis.alpha2) +
                  "\norder = " + std::to_string(s.synthesis.order) + "\n";
  if (s.synthesis.R1.size()) y += "R1 = " + matrix_text(s.synthesis.R1) + "\n";
  if (s.synthesis.R2.size()) y += "R2 = " + matrix_text(s.synthesis.R2) + "\n";
  if (s.synthesis.Q0.size()) y += "Q0 = " + matrix_text(s.synthesis.Q0) + "\n";
  out["synthesis"] = y;
  out["mesh"] = "[mesh]\nsynthesis_n = " + std::to_string(s.synthesis_n) +
                "\nsimulation_n = " + std::to_string(s.simulation_n) + "\npenalty = " + num(s.penalty) + "\n";
  out["simulation"] = "[simulation]\nt_end = " + num(s.t_end) + "\ndt = " + num(s.dt) +
                      "\nsnapshot_times = " + list(s.snapshot_times) + "\n";
  out["newton"] = "[newton]\ntol = " + num(s.newton.tol) + "\nmax_iter = " + std::to_string(s.newton.max_iter) + "\n";
  return out;
}

const std::vector<std::string> kOrder = {"scenario", "geometry", "regions", "physics", "control",
                                         "disturbance", "observation", "forcing", "actuator",
                                         "sensor", "signals", "synthesis", "mesh", "simulation",
                                         "newton"};

}  // namespace

std::string dump_scenario(const RoomScenario& s) {
  const auto parts = render(s);
  std::string out;
  for (const auto& name : kOrder) {
    if (parts.at(name).empty()) continue;
    if (!out.empty()) out += "\n";
    out += parts.at(name);
  }
  return out;
}

std::string scenario_hash(const RoomScenario& s, const std::vector<std::string>& sections) {
  const auto parts = render(s);
  std::string data;
  for (const auto& name : sections) {
    const auto it = parts.find(name);
    if (it == parts.end()) throw std::invalid_argument("unknown scenario section '" + name + "'");
    data += it->second;
  }
  return sha256_hex(data);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace roomreg
