#include "roomreg/balanced_truncation.hpp"

#include <cmath>

#include "roomreg/dense_linalg.hpp"

namespace roomreg {
namespace {

/// Factor F with F F^T = X for a symmetric positive semidefinite X.
Mat psd_factor(const Mat& X, const char* name) {
  const SymmetricEigen eig = symmetric_eigen(X);
  const Vec& l = eig.values;
  const double top = std::max(l.maxCoeff(), 0.0);
  if (l.minCoeff() < -1e-8 * std::max(top, 1e-300))
    throw NumericalError(std::string(name) + " Gramian is indefinite; the system is not stable");
  return eig.vectors * l.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

BalancedTruncation balanced_truncate(const Mat& A0, const Mat& E, const Mat& B0, const Mat& C0,
                                     int r) {
  const int n = static_cast<int>(A0.rows());
  if (A0.cols() != n || B0.rows() != n || C0.cols() != n)
    throw std::invalid_argument("balanced truncation: inconsistent dimensions");
  if (r < 0) throw std::invalid_argument("balanced truncation: negative order");

  Mat A = A0, B = B0, C = C0;
  if (E.size() != 0) {
    Eigen::LLT<Mat> llt(E);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("mass matrix is not positive definite");
    const auto L = llt.matrixL();
    A = L.solve(L.solve(A0).transpose()).transpose();
    B = L.solve(B0);
    C = L.solve(C0.transpose()).transpose();
  }

  const SchurForm schur = real_schur(A);
  for (int i = 0; i < n; ++i)
    if (schur.T(i, i) >= 0.0)
      throw NumericalError("balanced truncation needs a stable system (eigenvalue with Re >= 0)");

  BalancedTruncation out;
  out.P = solve_lyapunov(schur, B * B.transpose(), false);
  out.Q = solve_lyapunov(schur, C.transpose() * C, true);
  const Mat R = psd_factor(out.P, "controllability");
  const Mat S = psd_factor(out.Q, "observability");
  const Svd sv = svd(S.transpose() * R);
  out.hankel = sv.s;

  int k = std::min(r, n);
  while (k > 0 && k < n && std::abs(sv.s[k] - sv.s[k - 1]) <= 1e-10 * sv.s[0]) ++k;
  out.order = k;
  out.error_bound = 2.0 * sv.s.tail(n - k).sum();
  if (k == n) {
    out.A = A;
    out.B = B;
    out.C = C;
    return out;
  }
  if (k > 0 && !(sv.s[k - 1] > 1e-14 * sv.s[0]))
    throw std::invalid_argument("requested order exceeds the numerically minimal order");

  const Vec isq = sv.s.head(k).cwiseSqrt().cwiseInverse();
  const Mat Tr = R * sv.V.leftCols(k) * isq.asDiagonal();
  const Mat Wr = S * sv.U.leftCols(k) * isq.asDiagonal();
  out.A = Wr.transpose() * A * Tr;
  out.B = Wr.transpose() * B;
  out.C = C * Tr;
  return out;
}

}  // namespace roomreg
