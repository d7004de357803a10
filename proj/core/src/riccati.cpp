#include "roomreg/riccati.hpp"

#include <cmath>

#include "roomreg/dense_linalg.hpp"

namespace roomreg {
namespace {

Mat symmetrize(const Mat& X) { return 0.5 * (X + X.transpose()); }

/// Residual of A^T X + X A - X G X + Q in standard form.
Mat standard_residual(const Mat& A, const Mat& G, const Mat& Q, const Mat& X) {
  const Mat XA = X * A;
  return XA.transpose() + XA - X * G * X + Q;
}

double relative(const Mat& res, const Mat& X) {
  const double nx = X.norm();
  return nx > 0.0 ? res.norm() / nx : res.norm();
}

}  // namespace

double care_relative_residual(const Mat& A, const Mat& E, const Mat& B, const Mat& Q,
                              const Mat& R, double shift, const Mat& X) {
  const int n = static_cast<int>(A.rows());
  const Mat Em = E.size() == 0 ? Mat::Identity(n, n) : E;
  const Mat As = A + shift * Em;
  const Mat XE = X * Em;
  const Mat XB = Em.transpose() * X * B;
  const Mat res = As.transpose() * XE + XE.transpose() * As -
                  XB * R.llt().solve(XB.transpose()) + Q;
  return relative(res, X);
}

CareSolution solve_care(const Mat& A, const Mat& E, const Mat& B, const Mat& Q, const Mat& R,
                        const CareOptions& opt) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n)
    throw std::invalid_argument("CARE matrices have inconsistent dimensions");
  if (R.rows() != B.cols() || R.cols() != B.cols())
    throw std::invalid_argument("CARE weight R has wrong size");
  if (E.size() != 0 && (E.rows() != n || E.cols() != n))
    throw std::invalid_argument("CARE mass matrix has wrong size");
  Eigen::LLT<Mat> rllt(R);
  if (rllt.info() != Eigen::Success) throw std::invalid_argument("CARE weight R is not positive definite");

  // Reduce to standard form with E = L L^T.
  Mat As, Bs, Qs;
  Eigen::LLT<Mat> ellt;
  if (E.size() != 0) {
    ellt.compute(E);
    if (ellt.info() != Eigen::Success) throw std::invalid_argument("CARE mass matrix is not positive definite");
    const auto L = ellt.matrixL();
    As = L.solve(L.solve(A).transpose()).transpose();  // L^{-1} A L^{-T}
    Bs = L.solve(B);
    Qs = L.solve(L.solve(Q).transpose()).transpose();
    Qs = symmetrize(Qs);
  } else {
    As = A;
    Bs = B;
    Qs = symmetrize(Q);
  }
  As.diagonal().array() += opt.shift;
  const Mat G = symmetrize(Bs * rllt.solve(Bs.transpose()));

  Mat H(2 * n, 2 * n);
  H << As, -G, -Qs, -As.transpose();
  const SchurForm schur = real_schur(H, SchurOrder::LeftHalfPlane);
  if (schur.selected != n)
    throw NumericalError("Hamiltonian matrix has " + std::to_string(2 * n - 2 * schur.selected) +
                         " eigenvalues on or near the imaginary axis: (A, B) not stabilizable or "
                         "(A, Q) not detectable");
  const Mat U11 = schur.U.topLeftCorner(n, n);
  const Mat U21 = schur.U.bottomLeftCorner(n, n);
  Eigen::PartialPivLU<Mat> lu(U11.transpose());
  if (!(lu.rcond() > 1e-14))
    throw NumericalError("stable invariant subspace of the Hamiltonian is not a graph");
  Mat Y = symmetrize(lu.solve(U21.transpose()).transpose());

  CareSolution sol;
  Mat res = standard_residual(As, G, Qs, Y);
  double rel = relative(res, Y);
  // Newton-Kleinman in correction form: (A - G Y)^T D + D (A - G Y) = -res.
  while (rel > opt.residual_tol && sol.refinement_steps < opt.max_refinement_steps) {
    const Mat Ak = As - G * Y;
    const Mat D = solve_lyapunov(real_schur(Ak), res, true);
    const Mat Ynew = symmetrize(Y + D);
    const Mat rnew = standard_residual(As, G, Qs, Ynew);
    ++sol.refinement_steps;
    if (relative(rnew, Ynew) >= rel) break;
    Y = Ynew;
    res = rnew;
    rel = relative(res, Y);
  }

  sol.closed_loop_abscissa = spectral_abscissa(As - G * Y);
  if (!(sol.closed_loop_abscissa < 0.0))
    throw NumericalError("Riccati solution is not stabilizing (closed-loop abscissa " +
                         std::to_string(sol.closed_loop_abscissa) + ")");
  sol.closed_loop_abscissa -= opt.shift;

  if (E.size() != 0) {
    const auto L = ellt.matrixL();
    // X = L^{-T} Y L^{-1}
    const Mat Z = L.transpose().solve(Y);
    sol.X = symmetrize(L.transpose().solve(Z.transpose()).transpose());
  } else {
    sol.X = Y;
  }
  sol.relative_residual = care_relative_residual(A, E, B, Q, R, opt.shift, sol.X);
  return sol;
}

}  // namespace roomreg
