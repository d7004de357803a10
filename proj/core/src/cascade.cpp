#include "roomreg/cascade.hpp"

#include <Eigen/SparseLU>

namespace roomreg {
namespace {

void append(std::vector<Triplet>& out, const SpMat& m, int r0, int c0, double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
}

void append(std::vector<Triplet>& out, const Mat& m, int r0, int c0) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out.emplace_back(r0 + i, c0 + j, m(i, j));
}

SpMat build(int rows, int cols, const std::vector<Triplet>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void place(SpMat& target, int rows, int cols, const std::vector<Triplet>& t) {
  target = build(rows, cols, t);
}

CMat small_transfer(const Mat& A, const Mat& B, const Mat& C, cplx s) {
  const int n = static_cast<int>(A.rows());
  const CMat M = s * CMat::Identity(n, n) - A.cast<cplx>();
  return C.cast<cplx>() * M.partialPivLu().solve(B.cast<cplx>());
}

}  // namespace

SpMat SaddlePointPlant::mass() const {
  std::vector<Triplet> t;
  append(t, M_v, 0, 0);
  append(t, M_t, n_v, n_v);
  return build(n_v + n_t, n_v + n_t, t);
}

SpMat SaddlePointPlant::dynamics() const {
  std::vector<Triplet> t;
  append(t, A_vv, 0, 0);
  append(t, A_vt, 0, n_v);
  append(t, A_tv, n_v, 0);
  append(t, A_tt, n_v, n_v);
  return build(n_v + n_t, n_v + n_t, t);
}

SaddlePointPlant linearize(const FemSpaces& s, const LinearForms& f, const SteadyState& steady,
                           const InputMatrices& inputs, const Mat& observations) {
  if (steady.w.size() != s.n_v || steady.T.size() != s.n_t)
    throw std::invalid_argument("steady state does not match the finite element spaces");
  const int n = s.n_v + s.n_t;
  if (inputs.B.rows() != n || inputs.Bd.rows() != n || observations.cols() != n)
    throw std::invalid_argument("input/output maps do not match the finite element spaces");
  const ConvectionForms c = assemble_convection(s, steady.w, steady.T);
  SaddlePointPlant p;
  p.n_v = s.n_v;
  p.n_t = s.n_t;
  p.n_p = s.n_p;
  p.M_v = f.M_v;
  p.M_t = f.M_t;
  p.M_p = f.M_p;
  p.A_vv = -(f.A_v + c.N_v);
  p.A_vt = f.B0;
  p.A_tv = -c.N_tv;
  p.A_tt = -(f.A_t + c.N_tt);
  p.D = f.D;
  p.B = inputs.B;
  p.Bd = inputs.Bd;
  p.C = observations;
  return p;
}

PenaltyPlant eliminate_pressure_penalty(const SaddlePointPlant& p, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  const int nb = p.n_v + p.n_t, n = nb + p.n_p;
  std::vector<Triplet> e, a;
  append(e, p.M_v, 0, 0);
  append(e, p.M_t, p.n_v, p.n_v);
  append(a, p.dynamics(), 0, 0);
  append(a, SpMat(p.D.transpose()), 0, nb);
  append(a, p.D, nb, 0);
  append(a, p.M_p, nb, nb, epsilon);

  PenaltyPlant out;
  out.n_v = p.n_v;
  out.n_t = p.n_t;
  out.n_p = p.n_p;
  out.epsilon = epsilon;
  place(out.sys.E, n, n, e);
  place(out.sys.A, n, n, a);
  out.sys.B = Mat::Zero(n, p.B.cols());
  out.sys.B.topRows(nb) = p.B;
  out.sys.Bd = Mat::Zero(n, p.Bd.cols());
  out.sys.Bd.topRows(nb) = p.Bd;
  out.sys.C = Mat::Zero(p.C.rows(), n);
  out.sys.C.leftCols(nb) = p.C;
  out.sys.Dd = Mat::Zero(p.C.rows(), p.Bd.cols());
  return out;
}

NullspacePlant eliminate_pressure_nullspace(const SaddlePointPlant& p) {
  const Mat Dt = Mat(p.D).transpose();  // n_v x n_p
  Eigen::ColPivHouseholderQR<Mat> qr(Dt);
  const int rank = static_cast<int>(qr.rank());
  if (rank < p.n_p)
    throw NumericalError("divergence block is rank deficient (rank " + std::to_string(rank) +
                         " of " + std::to_string(p.n_p) + ")");
  const int k = p.n_v - rank;
  Mat Q = qr.householderQ() * Mat::Identity(p.n_v, p.n_v);
  const Mat Z0 = Q.rightCols(k);
  Q.resize(0, 0);

  const Mat Mv_r = Z0.transpose() * (p.M_v * Z0);
  Eigen::LLT<Mat> llt_v(Mv_r);
  Eigen::LLT<Mat> llt_t{Mat(p.M_t)};
  if (llt_v.info() != Eigen::Success || llt_t.info() != Eigen::Success)
    throw NumericalError("reduced mass matrix is not positive definite");

  NullspacePlant out;
  out.n_v = p.n_v;
  out.n_t = p.n_t;
  out.n_div_free = k;
  const int nb = p.n_v + p.n_t, nr = k + p.n_t;
  out.T = Mat::Zero(nb, nr);
  // Z0 L^{-T}: solve L X^T = Z0^T.
  out.T.topLeftCorner(p.n_v, k) =
      llt_v.matrixL().solve(Z0.transpose()).transpose();
  out.T.bottomRightCorner(p.n_t, p.n_t) =
      llt_t.matrixL().solve(Mat::Identity(p.n_t, p.n_t)).transpose();

  const Mat AT = p.dynamics() * out.T;
  out.sys.A = out.T.transpose() * AT;
  out.sys.E = Mat::Identity(nr, nr);
  out.sys.B = out.T.transpose() * p.B;
  out.sys.Bd = out.T.transpose() * p.Bd;
  out.sys.C = p.C * out.T;
  out.sys.Dd = Mat::Zero(p.C.rows(), p.Bd.cols());
  return out;
}

Vec NullspacePlant::project(const SaddlePointPlant& plant, const Vec& physical) const {
  if (physical.size() != T.rows()) throw std::invalid_argument("state has wrong size");
  return T.transpose() * (plant.mass() * physical);
}

ActuatorSensor ActuatorSensor::identity_lag(int m, int p) {
  ActuatorSensor as;
  as.A_a = -Mat::Identity(m, m);
  as.B_a = Mat::Identity(m, m);
  as.C_a = Mat::Identity(m, m);
  as.A_s = -Mat::Identity(p, p);
  as.B_s = Mat::Identity(p, p);
  as.C_s = Mat::Identity(p, p);
  return as;
}

void ActuatorSensor::validate(int plant_inputs, int plant_outputs) const {
  const auto na = A_a.rows(), ns = A_s.rows();
  if (na == 0 || ns == 0)
    throw std::invalid_argument("actuator and sensor blocks must both have states");
  if (A_a.cols() != na || B_a.rows() != na || C_a.cols() != na)
    throw std::invalid_argument("actuator matrices have inconsistent dimensions");
  if (A_s.cols() != ns || B_s.rows() != ns || C_s.cols() != ns)
    throw std::invalid_argument("sensor matrices have inconsistent dimensions");
  if (C_a.rows() != plant_inputs)
    throw std::invalid_argument("C_a must have one row per plant input");
  if (B_s.cols() != plant_outputs)
    throw std::invalid_argument("B_s must have one column per plant output");
}

template <class Matrix>
CascadeSystem<Matrix> couple_cascade(const StateSpace<Matrix>& plant, int dynamic_plant,
                                     const ActuatorSensor& as) {
  as.validate(plant.inputs(), plant.outputs());
  CascadeLayout L;
  L.n_plant = plant.states();
  L.dynamic_plant = dynamic_plant;
  L.actuator = L.n_plant;
  L.n_actuator = as.actuator_states();
  L.sensor = L.actuator + L.n_actuator;
  L.n_sensor = as.sensor_states();
  const int n = L.total();
  const int m = static_cast<int>(as.B_a.cols()), p = static_cast<int>(as.C_s.rows());

  CascadeSystem<Matrix> c;
  c.layout = L;
  const Mat BbCa = plant.B * as.C_a;
  const Mat BsCb = as.B_s * plant.C;
  if constexpr (std::is_same_v<Matrix, SpMat>) {
    std::vector<Triplet> e, a;
    append(e, plant.E, 0, 0);
    append(a, plant.A, 0, 0);
    append(a, BbCa, 0, L.actuator);
    append(a, as.A_a, L.actuator, L.actuator);
    append(a, BsCb, L.sensor, 0);
    append(a, as.A_s, L.sensor, L.sensor);
    for (int i = L.actuator; i < n; ++i) e.emplace_back(i, i, 1.0);
    place(c.sys.E, n, n, e);
    place(c.sys.A, n, n, a);
  } else {
    c.sys.E = Mat::Zero(n, n);
    c.sys.E.topLeftCorner(L.n_plant, L.n_plant) = plant.E;
    c.sys.E.bottomRightCorner(n - L.n_plant, n - L.n_plant).setIdentity();
    c.sys.A = Mat::Zero(n, n);
    c.sys.A.topLeftCorner(L.n_plant, L.n_plant) = plant.A;
    c.sys.A.block(0, L.actuator, L.n_plant, L.n_actuator) = BbCa;
    c.sys.A.block(L.actuator, L.actuator, L.n_actuator, L.n_actuator) = as.A_a;
    c.sys.A.block(L.sensor, 0, L.n_sensor, L.n_plant) = BsCb;
    c.sys.A.block(L.sensor, L.sensor, L.n_sensor, L.n_sensor) = as.A_s;
  }
  c.sys.B = Mat::Zero(n, m);
  c.sys.B.middleRows(L.actuator, L.n_actuator) = as.B_a;
  c.sys.C = Mat::Zero(p, n);
  c.sys.C.middleCols(L.sensor, L.n_sensor) = as.C_s;
  c.sys.Bd = Mat::Zero(n, plant.disturbances());
  c.sys.Bd.topRows(L.n_plant) = plant.Bd;
  c.sys.Dd = Mat::Zero(p, plant.disturbances());
  return c;
}

template SparseCascade couple_cascade(const SparseSystem&, int, const ActuatorSensor&);
template DenseCascade couple_cascade(const DenseSystem&, int, const ActuatorSensor&);

SparseCascade couple_cascade(const PenaltyPlant& plant, const ActuatorSensor& as) {
  return couple_cascade(plant.sys, plant.dynamic_states(), as);
}

DenseCascade couple_cascade(const NullspacePlant& plant, const ActuatorSensor& as) {
  return couple_cascade(plant.sys, plant.sys.states(), as);
}

std::vector<CMat> transfer_function(const SparseSystem& sys, const std::vector<cplx>& points) {
  const CSpMat E = sys.E.cast<cplx>(), A = sys.A.cast<cplx>();
  const CMat B = sys.B.cast<cplx>(), C = sys.C.cast<cplx>();
  std::vector<CMat> out;
  out.reserve(points.size());
  Eigen::SparseLU<CSpMat> lu;
  for (const cplx s : points) {
    CSpMat M = s * E - A;
    M.makeCompressed();
    lu.compute(M);
    if (lu.info() != Eigen::Success)
      throw NumericalError("sE - A is singular at the requested point");
    out.push_back(C * lu.solve(B));
  }
  return out;
}

std::vector<CMat> transfer_function(const DenseSystem& sys, const std::vector<cplx>& points) {
  std::vector<CMat> out;
  out.reserve(points.size());
  const CMat B = sys.B.cast<cplx>(), C = sys.C.cast<cplx>();
  for (const cplx s : points) {
    const CMat M = s * sys.E.cast<cplx>() - sys.A.cast<cplx>();
    Eigen::PartialPivLU<CMat> lu(M);
    out.push_back(C * lu.solve(B));
  }
  return out;
}

CMat transfer_function(const Mat& A, const Mat& B, const Mat& C, cplx s) {
  return small_transfer(A, B, C, s);
}

CascadeFactors cascade_factors(const SparseSystem& plant, const ActuatorSensor& as, cplx s) {
  CascadeFactors f;
  f.P_a = small_transfer(as.A_a, as.B_a, as.C_a, s);
  f.P_s = small_transfer(as.A_s, as.B_s, as.C_s, s);
  f.P_b = transfer_function(plant, std::vector<cplx>{s}).front();
  return f;
}

}  // namespace roomreg
