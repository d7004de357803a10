#pragma once

#include <vector>

#include "roomreg/assembly.hpp"
#include "roomreg/steady_state.hpp"

namespace roomreg {

/// E x' = A x + B u + Bd d,  y = C x + Dd d.
template <class Matrix>
struct StateSpace {
  Matrix E, A;
  Mat B, C, Bd, Dd;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
  int disturbances() const { return static_cast<int>(Bd.cols()); }
};

using SparseSystem = StateSpace<SpMat>;
using DenseSystem = StateSpace<Mat>;

/// Linearized plant before pressure elimination. State blocks are
/// [v (n_v); th (n_t)]; the pressure p (n_p) enters through D.
struct SaddlePointPlant {
  int n_v = 0, n_t = 0, n_p = 0;
  SpMat M_v, M_t, M_p;
  SpMat A_vv;  // -(A_v + N_v(w_ss))
  SpMat A_vt;  // B0
  SpMat A_tv;  // -N_tv(T_ss)
  SpMat A_tt;  // -(A_t + N_tt(w_ss))
  SpMat D;     // n_p x n_v
  Mat B, Bd;   // (n_v + n_t) columns per input
  Mat C;       // rows act on [v; th]

  SpMat mass() const;      // diag(M_v, M_t)
  SpMat dynamics() const;  // [[A_vv, A_vt], [A_tv, A_tt]]
};

SaddlePointPlant linearize(const FemSpaces& spaces, const LinearForms& forms,
                           const SteadyState& steady, const InputMatrices& inputs,
                           const Mat& observations);

enum class PressureElimination { Penalty, Nullspace };

/// Plant in ODE form, either sparse (penalty) or dense (nullspace).
///
/// Penalty: the pressure stays as an algebraic block, E = diag(M_v, M_t, 0),
/// with the constraint row D v + eps M_p p = 0; eliminating it reproduces
/// p = -(1/eps) M_p^{-1} D v. Physical layout: [v; th; p].
///
/// Nullspace: x_phys = T z with T = diag(Z_0 L_v^{-T}, L_t^{-T}), where
/// Z_0 spans ker D and T^T diag(M_v, M_t) T = I, so the reduced system has E = I.
struct PenaltyPlant {
  SparseSystem sys;
  int n_v = 0, n_t = 0, n_p = 0;
  double epsilon = 0.0;
  int dynamic_states() const { return n_v + n_t; }
};

struct NullspacePlant {
  DenseSystem sys;
  int n_v = 0, n_t = 0;
  int n_div_free = 0;  // dimension of ker D
  Mat T;               // (n_v + n_t) x states
  /// Mass-orthogonal projection of a physical [v; th] onto reduced coordinates.
  Vec project(const SaddlePointPlant& plant, const Vec& physical) const;
};

PenaltyPlant eliminate_pressure_penalty(const SaddlePointPlant& plant, double epsilon);
NullspacePlant eliminate_pressure_nullspace(const SaddlePointPlant& plant);

struct ActuatorSensor {
  Mat A_a, B_a, C_a;
  Mat A_s, B_s, C_s;

  static ActuatorSensor identity_lag(int m, int p);  // A = -I, B = C = I
  int actuator_states() const { return static_cast<int>(A_a.rows()); }
  int sensor_states() const { return static_cast<int>(A_s.rows()); }
  void validate(int plant_inputs, int plant_outputs) const;
};

/// Offsets of the cascade state [x_b; x_a; x_s]. For the penalty plant x_b
/// includes the algebraic pressure block at the end.
struct CascadeLayout {
  int plant = 0, n_plant = 0;
  int dynamic_plant = 0;  // leading entries of x_b with a nonzero mass
  int actuator = 0, n_actuator = 0;
  int sensor = 0, n_sensor = 0;
  int total() const { return n_plant + n_actuator + n_sensor; }
};

template <class Matrix>
struct CascadeSystem {
  StateSpace<Matrix> sys;
  CascadeLayout layout;
};

using SparseCascade = CascadeSystem<SpMat>;
using DenseCascade = CascadeSystem<Mat>;

/// Rows [A_b, B_b C_a, 0; 0, A_a, 0; B_s C_b, 0, A_s]; B = [0; B_a; 0];
/// C = [0, 0, C_s]; Bd = [B_bd; 0; 0]; Dd = 0.
SparseCascade couple_cascade(const PenaltyPlant& plant, const ActuatorSensor& as);
DenseCascade couple_cascade(const NullspacePlant& plant, const ActuatorSensor& as);
template <class Matrix>
CascadeSystem<Matrix> couple_cascade(const StateSpace<Matrix>& plant, int dynamic_plant,
                                     const ActuatorSensor& as);

/// C (sE - A)^{-1} B at each point s.
std::vector<CMat> transfer_function(const SparseSystem& sys, const std::vector<cplx>& points);
std::vector<CMat> transfer_function(const DenseSystem& sys, const std::vector<cplx>& points);
CMat transfer_function(const Mat& A, const Mat& B, const Mat& C, cplx s);

struct CascadeFactors {
  CMat P_s, P_b, P_a;
};

/// Transfer functions of the three subsystems at s, evaluated separately.
CascadeFactors cascade_factors(const SparseSystem& plant, const ActuatorSensor& as, cplx s);

}  // namespace roomreg
