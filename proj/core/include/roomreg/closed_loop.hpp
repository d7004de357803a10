#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roomreg/cascade.hpp"
#include "roomreg/controller.hpp"
#include "roomreg/signals.hpp"

namespace roomreg {

/// E_e x_e' = A_e x_e + B_e w,  e = C_e x_e + D_e w, with x_e = (x, z) and
/// w = (u_d, y_ref):
///   A_e = [[A, B K], [G2 C, G1]],  B_e = [[B_d, 0], [G2 D_d, -G2]],
///   C_e = [C, 0],  D_e = [D_d, -I].
template <class Matrix>
struct ClosedLoopSystem {
  Matrix E, A;
  Mat B, C, D;
  Mat U;   // control u = U x_e
  Mat Ub;  // boundary input u_b = C_a x_a = Ub x_e
  int n_plant = 0, n_controller = 0, n_disturbance = 0;

  int states() const { return static_cast<int>(A.rows()); }
  int outputs() const { return static_cast<int>(C.rows()); }
};

using SparseClosedLoop = ClosedLoopSystem<SpMat>;
using DenseClosedLoop = ClosedLoopSystem<Mat>;

SparseClosedLoop assemble_closed_loop(const SparseCascade& plant, const ActuatorSensor& as,
                                      const ControllerRealization& ctrl);
DenseClosedLoop assemble_closed_loop(const DenseCascade& plant, const ActuatorSensor& as,
                                     const ControllerRealization& ctrl);

struct ClosedLoopTrajectory {
  std::vector<double> t;
  Mat y, y_ref, e;  // rows = time samples
  Mat u, u_b;
  std::string method;
  double dt = 0.0;
  std::vector<double> snapshot_times;
  std::vector<Vec> snapshots;  // full x_e at snapshot_times
};

struct IntegrationOptions {
  double t_end = 50.0;
  double dt = 1e-2;
  std::vector<double> snapshot_times;  // rounded to the nearest step
};

/// Trapezoidal rule with one factorization of E - dt/2 A reused across
/// steps. Throws NumericalError with the step index if a solve fails.
ClosedLoopTrajectory integrate(const SparseClosedLoop& cl, const ExogenousSignals& signals,
                               const Vec& x0, const IntegrationOptions& options);
ClosedLoopTrajectory integrate(const DenseClosedLoop& cl, const ExogenousSignals& signals,
                               const Vec& x0, const IntegrationOptions& options);

struct ErrorMetrics {
  Vec sup, rms;  // per channel
  double sup_norm = 0.0;  // sup over the window of ||e(t)||_2
};

/// Reduction over the samples with t_a <= t <= t_b.
ErrorMetrics error_metrics(const ClosedLoopTrajectory& traj, double t_a, double t_b);

struct ExponentialFit {
  double rate = 0.0;       // slope of log ||e(t)||
  double intercept = 0.0;
};

/// Least-squares line through log ||e(t)|| for t in [t_a, t_b]; samples
/// with e = 0 are skipped.
ExponentialFit fit_error_decay(const ClosedLoopTrajectory& traj, double t_a, double t_b);

/// Columns t, y_i, y_ref_i, e_i, u_j, u_b_j.
void write_trajectory_csv(const std::filesystem::path& path, const ClosedLoopTrajectory& traj);

}  // namespace roomreg
