#include "roomreg/closed_loop.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

#include <Eigen/SparseLU>

namespace roomreg {
namespace {

void append(std::vector<Triplet>& out, const SpMat& m, int r0, int c0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) out.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
}

void append(std::vector<Triplet>& out, const Mat& m, int r0, int c0) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out.emplace_back(r0 + i, c0 + j, m(i, j));
}

template <class Matrix>
void check_dims(const CascadeSystem<Matrix>& plant, const ActuatorSensor& as,
                const ControllerRealization& ctrl) {
  if (plant.sys.inputs() != ctrl.inputs() || plant.sys.outputs() != ctrl.outputs())
    throw std::invalid_argument("controller dimensions (" + std::to_string(ctrl.inputs()) + " inputs, " +
                                std::to_string(ctrl.outputs()) + " outputs) do not match the plant");
  if (ctrl.cal_G1.cols() != ctrl.dim() || ctrl.cal_G2.rows() != ctrl.dim() || ctrl.K.cols() != ctrl.dim())
    throw std::invalid_argument("controller blocks have inconsistent dimensions");
  if (as.actuator_states() != plant.layout.n_actuator)
    throw std::invalid_argument("actuator does not match the cascade layout");
}

template <class Matrix>
ClosedLoopSystem<Matrix> common_blocks(const CascadeSystem<Matrix>& plant, const ActuatorSensor& as,
                                       const ControllerRealization& ctrl) {
  check_dims(plant, as, ctrl);
  const auto& s = plant.sys;
  const int n = s.states(), nz = ctrl.dim(), p = s.outputs(), nd = s.disturbances();
  ClosedLoopSystem<Matrix> cl;
  cl.n_plant = n;
  cl.n_controller = nz;
  cl.n_disturbance = nd;
  cl.B = Mat::Zero(n + nz, nd + p);
  cl.B.topLeftCorner(n, nd) = s.Bd;
  cl.B.bottomLeftCorner(nz, nd) = ctrl.cal_G2 * s.Dd;
  cl.B.bottomRightCorner(nz, p) = -ctrl.cal_G2;
  cl.C = Mat::Zero(p, n + nz);
  cl.C.leftCols(n) = s.C;
  cl.D = Mat::Zero(p, nd + p);
  cl.D.leftCols(nd) = s.Dd;
  cl.D.rightCols(p) = -Mat::Identity(p, p);
  cl.U = Mat::Zero(ctrl.inputs(), n + nz);
  cl.U.rightCols(nz) = ctrl.K;
  cl.Ub = Mat::Zero(as.C_a.rows(), n + nz);
  cl.Ub.middleCols(plant.layout.actuator, plant.layout.n_actuator) = as.C_a;
  return cl;
}

template <class Matrix>
ClosedLoopTrajectory run(const ClosedLoopSystem<Matrix>& cl, const ExogenousSignals& sig,
                         const Vec& x0, const IntegrationOptions& opt) {
  const int n = cl.states(), p = cl.outputs();
  if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0)) throw std::invalid_argument("need dt > 0 and t_end >= 0");
  if (x0.size() != n) throw std::invalid_argument("initial state has wrong dimension");
  if (static_cast<int>(sig.reference.size()) != p ||
      static_cast<int>(sig.disturbance.size()) != cl.n_disturbance)
    throw std::invalid_argument("signals do not match the closed-loop inputs");
  const double h = opt.dt;
  const long steps = std::lround(opt.t_end / h);

  auto exo = [&](double t) {
    Vec w(cl.n_disturbance + p);
    w << sig.disturbance_at(t), sig.reference_at(t);
    return w;
  };

  std::function<Vec(const Vec&)> solve;
  Eigen::SparseLU<SpMat> slu;
  Eigen::PartialPivLU<Mat> dlu;
  if constexpr (std::is_same_v<Matrix, SpMat>) {
    SpMat M = cl.E - 0.5 * h * cl.A;
    M.makeCompressed();
    slu.compute(M);
    if (slu.info() != Eigen::Success) throw NumericalError("E - dt/2 A is singular at step 0");
    solve = [&](const Vec& b) { return Vec(slu.solve(b)); };
  } else {
    dlu.compute(cl.E - 0.5 * h * cl.A);
    solve = [&](const Vec& b) { return Vec(dlu.solve(b)); };
  }

  ClosedLoopTrajectory tr;
  tr.method = "trapezoidal";
  tr.dt = h;
  const long samples = steps + 1;
  tr.t.resize(samples);
  tr.y.resize(samples, p);
  tr.y_ref.resize(samples, p);
  tr.e.resize(samples, p);
  tr.u.resize(samples, cl.U.rows());
  tr.u_b.resize(samples, cl.Ub.rows());
  std::vector<long> snap_index;
  for (double ts : opt.snapshot_times) {
    const long k = std::clamp(std::lround(ts / h), 0L, steps);
    snap_index.push_back(k);
    tr.snapshot_times.push_back(k * h);
  }
  tr.snapshots.resize(snap_index.size());

  Vec x = x0;
  Vec w = exo(0.0);
  auto record = [&](long k, double t) {
    tr.t[k] = t;
    const Vec yr = sig.reference_at(t);
    const Vec e = cl.C * x + cl.D * w;
    tr.y_ref.row(k) = yr.transpose();
    tr.e.row(k) = e.transpose();
    tr.y.row(k) = (e + yr).transpose();
    tr.u.row(k) = (cl.U * x).transpose();
    tr.u_b.row(k) = (cl.Ub * x).transpose();
    for (size_t i = 0; i < snap_index.size(); ++i)
      if (snap_index[i] == k) tr.snapshots[i] = x;
  };
  record(0, 0.0);
  for (long k = 1; k <= steps; ++k) {
    const double t = k * h;
    const Vec w_next = exo(t);
    const Vec rhs = cl.E * x + 0.5 * h * (cl.A * x) + 0.5 * h * (cl.B * (w + w_next));
    x = solve(rhs);
    if (!x.allFinite()) throw NumericalError("time step " + std::to_string(k) + " produced a non-finite state");
    w = w_next;
    record(k, t);
  }
  return tr;
}

void put(std::ofstream& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

}  // namespace

SparseClosedLoop assemble_closed_loop(const SparseCascade& plant, const ActuatorSensor& as,
                                      const ControllerRealization& ctrl) {
  SparseClosedLoop cl = common_blocks(plant, as, ctrl);
  const auto& s = plant.sys;
  const int n = s.states(), nz = ctrl.dim(), ne = n + nz;
  std::vector<Triplet> e, a;
  append(e, s.E, 0, 0);
  for (int i = n; i < ne; ++i) e.emplace_back(i, i, 1.0);
  append(a, s.A, 0, 0);
  append(a, Mat(s.B * ctrl.K), 0, n);
  append(a, Mat(ctrl.cal_G2 * s.C), n, 0);
  append(a, ctrl.cal_G1, n, n);
  cl.E.resize(ne, ne);
  cl.E.setFromTriplets(e.begin(), e.end());
  cl.A.resize(ne, ne);
  cl.A.setFromTriplets(a.begin(), a.end());
  cl.E.makeCompressed();
  cl.A.makeCompressed();
  return cl;
}

DenseClosedLoop assemble_closed_loop(const DenseCascade& plant, const ActuatorSensor& as,
                                     const ControllerRealization& ctrl) {
  DenseClosedLoop cl = common_blocks(plant, as, ctrl);
  const auto& s = plant.sys;
  const int n = s.states(), nz = ctrl.dim(), ne = n + nz;
  cl.E = Mat::Identity(ne, ne);
  cl.E.topLeftCorner(n, n) = s.E;
  cl.A = Mat::Zero(ne, ne);
  cl.A.topLeftCorner(n, n) = s.A;
  cl.A.topRightCorner(n, nz) = s.B * ctrl.K;
  cl.A.bottomLeftCorner(nz, n) = ctrl.cal_G2 * s.C;
  cl.A.bottomRightCorner(nz, nz) = ctrl.cal_G1;
  return cl;
}

ClosedLoopTrajectory integrate(const SparseClosedLoop& cl, const ExogenousSignals& signals,
                               const Vec& x0, const IntegrationOptions& options) {
  return run(cl, signals, x0, options);
}

ClosedLoopTrajectory integrate(const DenseClosedLoop& cl, const ExogenousSignals& signals,
                               const Vec& x0, const IntegrationOptions& options) {
  return run(cl, signals, x0, options);
}

ErrorMetrics error_metrics(const ClosedLoopTrajectory& tr, double t_a, double t_b) {
  const Eigen::Index p = tr.e.cols();
  ErrorMetrics m;
  m.sup = Vec::Zero(p);
  m.rms = Vec::Zero(p);
  long count = 0;
  for (size_t k = 0; k < tr.t.size(); ++k) {
    if (tr.t[k] < t_a - 1e-12 || tr.t[k] > t_b + 1e-12) continue;
    const auto row = tr.e.row(static_cast<Eigen::Index>(k));
    m.sup = m.sup.cwiseMax(row.transpose().cwiseAbs());
    m.rms += row.transpose().cwiseAbs2();
    m.sup_norm = std::max(m.sup_norm, row.norm());
    ++count;
  }
  if (count == 0) throw std::invalid_argument("error window contains no samples");
  m.rms = (m.rms / static_cast<double>(count)).cwiseSqrt();
  return m;
}

ExponentialFit fit_error_decay(const ClosedLoopTrajectory& tr, double t_a, double t_b) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  long count = 0;
  for (size_t k = 0; k < tr.t.size(); ++k) {
    if (tr.t[k] < t_a - 1e-12 || tr.t[k] > t_b + 1e-12) continue;
    const double nrm = tr.e.row(static_cast<Eigen::Index>(k)).norm();
    if (!(nrm > 0.0)) continue;
    const double t = tr.t[k], y = std::log(nrm);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("need at least two nonzero error samples to fit");
  const double c = static_cast<double>(count);
  const double den = c * stt - st * st;
  ExponentialFit f;
  f.rate = (c * sty - st * sy) / den;
  f.intercept = (sy - f.rate * st) / c;
  return f;
}

void write_trajectory_csv(const std::filesystem::path& path, const ClosedLoopTrajectory& tr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t";
  for (Eigen::Index i = 0; i < tr.y.cols(); ++i) out << ",y_" << i + 1;
  for (Eigen::Index i = 0; i < tr.y_ref.cols(); ++i) out << ",y_ref_" << i + 1;
  for (Eigen::Index i = 0; i < tr.e.cols(); ++i) out << ",e_" << i + 1;
  for (Eigen::Index i = 0; i < tr.u.cols(); ++i) out << ",u_" << i + 1;
  for (Eigen::Index i = 0; i < tr.u_b.cols(); ++i) out << ",u_b_" << i + 1;
  out << '\n';
  for (size_t k = 0; k < tr.t.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    put(out, tr.t[k]);
    for (const Mat* m : {&tr.y, &tr.y_ref, &tr.e, &tr.u, &tr.u_b})
      for (Eigen::Index i = 0; i < m->cols(); ++i) {
        out << ',';
        put(out, (*m)(r, i));
      }
    out << '\n';
  }
}

}  // namespace roomreg
