#pragma once

#include "roomreg/types.hpp"

namespace roomreg {

struct CareOptions {
  double shift = 0.0;              // solves with A + shift*I
  double residual_tol = 1e-8;      // relative residual accepted without refinement
  int max_refinement_steps = 3;    // Newton-Kleinman steps started from the Schur solution
};

struct CareSolution {
  Mat X;
  double relative_residual = 0.0;
  double closed_loop_abscissa = 0.0;  // of the pencil (A - B R^{-1} B^T X E, E); below -shift
  int refinement_steps = 0;
};

/// Stabilizing solution of
///   (A + aE)^T X E + E^T X (A + aE) - E^T X B R^{-1} B^T X E + Q = 0
/// by the ordered Schur decomposition of the Hamiltonian matrix. E may be
/// empty (identity) or symmetric positive definite. Q must be symmetric.
///
/// Throws NumericalError naming the failed condition when the Hamiltonian
/// has eigenvalues on the imaginary axis, the stable subspace is not a
/// graph, or the closed loop is not Hurwitz.
CareSolution solve_care(const Mat& A, const Mat& E, const Mat& B, const Mat& Q, const Mat& R,
                        const CareOptions& options = {});

/// ||(A+aE)^T X E + E^T X (A+aE) - E^T X B R^{-1} B^T X E + Q||_F / ||X||_F
/// (the absolute residual when X = 0).
double care_relative_residual(const Mat& A, const Mat& E, const Mat& B, const Mat& Q,
                              const Mat& R, double shift, const Mat& X);

}  // namespace roomreg
