#include "roomreg/steady_state.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <Eigen/SparseLU>

namespace roomreg {
namespace {

bool has_outlet(const FemSpaces& s) { return !locate_region(s.mesh, "outlet").indices.empty(); }

void check_state(const FemSpaces& s, const SteadyState& st) {
  if (st.w.size() != s.n_v || st.T.size() != s.n_t || st.q.size() != s.n_p)
    throw std::invalid_argument("steady state does not match the finite element spaces");
}

void append_block(std::vector<Triplet>& out, const SpMat& m, int row0, int col0, double scale) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

}  // namespace

ForcingLoads assemble_forcing(const FemSpaces& spaces, const ForcingFields& f) {
  auto zero = [](const Eigen::Vector2d&) { return 0.0; };
  ForcingLoads loads;
  loads.f_w = velocity_load(spaces, f.fx ? f.fx : zero, f.fy ? f.fy : zero);
  loads.f_T = domain_load(spaces, Component::Temperature, f.fT ? f.fT : zero);
  return loads;
}

SteadyState SteadyState::zero(const FemSpaces& s) {
  SteadyState st;
  st.w = Vec::Zero(s.n_v);
  st.q = Vec::Zero(s.n_p);
  st.T = Vec::Zero(s.n_t);
  return st;
}

Vec nonlinear_residual(const FemSpaces& s, const LinearForms& f, const SteadyState& st,
                       const ForcingLoads& loads) {
  check_state(s, st);
  Vec r(s.n_v + s.n_t + s.n_p);
  r.segment(0, s.n_v) = loads.f_w - f.A_v * st.w - convection_residual(s, st.w) +
                        f.D.transpose() * st.q + f.B0 * st.T;
  r.segment(s.n_v, s.n_t) = loads.f_T - f.A_t * st.T - transport_residual(s, st.w, st.T);
  r.segment(s.n_v + s.n_t, s.n_p) = f.D * st.w;
  if (!has_outlet(s)) r[s.n_v + s.n_t] = 0.0;  // pinned pressure dof
  return r;
}

SteadyState newton_solve(const FemSpaces& s, const LinearForms& f, const ForcingLoads& loads,
                         const SteadyState& guess, const NewtonOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");
  check_state(s, guess);
  const int nv = s.n_v, nt = s.n_t, np = s.n_p, n = nv + nt + np;
  const bool pin = !has_outlet(s);

  SteadyState st = guess;
  st.history.clear();
  for (int k = 0;; ++k) {
    const Vec r = nonlinear_residual(s, f, st, loads);
    st.residual_norm = r.norm();
    st.history.push_back(st.residual_norm);
    if (st.residual_norm < opt.tol) return st;
    if (k >= opt.max_iter) {
      std::ostringstream os;
      os << "Newton did not converge in " << opt.max_iter
         << " iterations (last residual " << st.residual_norm << ")";
      throw NewtonDivergence(os.str(), st.history);
    }

    const ConvectionForms c = assemble_convection(s, st.w, st.T);
    std::vector<Triplet> trip;
    append_block(trip, f.A_v, 0, 0, 1.0);
    append_block(trip, c.N_v, 0, 0, 1.0);
    append_block(trip, f.B0, 0, nv, -1.0);
    append_block(trip, c.N_tv, nv, 0, 1.0);
    append_block(trip, f.A_t, nv, nv, 1.0);
    append_block(trip, c.N_tt, nv, nv, 1.0);
    const SpMat Dt = f.D.transpose();
    for (int col = 0; col < Dt.outerSize(); ++col)
      for (SpMat::InnerIterator it(Dt, col); it; ++it) {
        if (pin && it.col() == 0) continue;
        trip.emplace_back(it.row(), nv + nt + it.col(), -it.value());
        trip.emplace_back(nv + nt + it.col(), it.row(), -it.value());
      }
    if (pin) trip.emplace_back(nv + nt, nv + nt, 1.0);
    SpMat J(n, n);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw NumericalError("singular Jacobian at Newton step " + std::to_string(k + 1));
    // J is the derivative of F = f - r, so the step solves J d = r.
    const Vec d = lu.solve(r);
    if (lu.info() != Eigen::Success || !d.allFinite())
      throw NumericalError("singular Jacobian at Newton step " + std::to_string(k + 1));
    st.w += d.segment(0, nv);
    st.T += d.segment(nv, nt);
    st.q += d.segment(nv + nt, np);
  }
}

SteadyStateSequence two_stage_steady_state(const FemSpaces& s, const LinearForms& f,
                                           const ForcingFields& initial_forcing,
                                           const ForcingFields& forcing,
                                           const NewtonOptions& opt) {
  SteadyStateSequence seq;
  seq.initial = newton_solve(s, f, assemble_forcing(s, initial_forcing), SteadyState::zero(s), opt);
  seq.final = newton_solve(s, f, assemble_forcing(s, forcing), seq.initial, opt);
  return seq;
}

void save_steady_state(const std::filesystem::path& path, const SteadyState& st,
                       const std::string& key) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# key=" << key << "\n";
  out << "# residual=" << st.residual_norm << "\n";
  out << "block,index,value\n";
  char buf[64];
  auto write = [&](const char* block, const Vec& v) {
    for (int i = 0; i < v.size(); ++i) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v[i]);
      out << block << ',' << i << ',' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  };
  write("w", st.w);
  write("q", st.q);
  write("T", st.T);
}

SteadyState load_steady_state(const std::filesystem::path& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "# key=" + key)
    throw std::runtime_error("steady state file " + path.string() + " was computed for another setup");
  std::vector<double> w, q, T;
  SteadyState st;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# residual=", 0) == 0) {
      st.residual_norm = std::stod(line.substr(11));
      continue;
    }
    if (line[0] == '#' || line.rfind("block", 0) == 0) continue;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed line in " + path.string() + ": " + line);
    const std::string block = line.substr(0, c1);
    double v = 0.0;
    std::from_chars(line.data() + c2 + 1, line.data() + line.size(), v);
    if (block == "w") w.push_back(v);
    else if (block == "q") q.push_back(v);
    else if (block == "T") T.push_back(v);
    else throw std::runtime_error("unknown block '" + block + "' in " + path.string());
  }
  st.w = Eigen::Map<Vec>(w.data(), static_cast<Eigen::Index>(w.size()));
  st.q = Eigen::Map<Vec>(q.data(), static_cast<Eigen::Index>(q.size()));
  st.T = Eigen::Map<Vec>(T.data(), static_cast<Eigen::Index>(T.size()));
  return st;
}

}  // namespace roomreg
