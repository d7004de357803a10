#include "roomreg/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace roomreg {
namespace {

constexpr int kLeaf = 48;

lapack_logical left_half_plane(const double* re, const double* /*im*/) { return *re < 0.0; }

void check_info(lapack_int info, const char* routine) {
  if (info != 0) throw NumericalError(std::string(routine) + " failed (info " + std::to_string(info) + ")");
}

void check_square(const Mat& A, const char* what) {
  if (A.rows() != A.cols()) throw std::invalid_argument(std::string(what) + " must be square");
}

/// Split point near `mid` that does not cut a 2x2 diagonal block.
int split_point(const Eigen::Ref<const Mat>& T, int mid) {
  if (mid > 0 && mid < T.rows() && T(mid, mid - 1) != 0.0) ++mid;
  return mid;
}

/// (A + sigma I) x = r for upper quasi-triangular A; x overwrites r.
template <class Scalar>
void shifted_backsolve(const Eigen::Ref<const Mat>& A, Scalar sigma,
                       Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r) {
  const int m = static_cast<int>(A.rows());
  int i = m - 1;
  while (i >= 0) {
    if (i > 0 && A(i, i - 1) != 0.0) {
      const Scalar a = A(i - 1, i - 1) + sigma, b = A(i - 1, i);
      const Scalar c = A(i, i - 1), d = A(i, i) + sigma;
      const Scalar det = a * d - b * c;
      if (std::abs(det) < 1e-300) throw NumericalError("Sylvester equation is singular");
      const Scalar x0 = (d * r[i - 1] - b * r[i]) / det;
      const Scalar x1 = (a * r[i] - c * r[i - 1]) / det;
      r[i - 1] = x0;
      r[i] = x1;
      for (int k = 0; k < i - 1; ++k) r[k] -= A(k, i - 1) * x0 + A(k, i) * x1;
      i -= 2;
    } else {
      const Scalar piv = A(i, i) + sigma;
      if (std::abs(piv) < 1e-300) throw NumericalError("Sylvester equation is singular");
      r[i] /= piv;
      for (int k = 0; k < i; ++k) r[k] -= A(k, i) * r[i];
      i -= 1;
    }
  }
}

/// Column sweep for small problems: columns of X are resolved from the last
/// block of B backwards.
void sylvester_leaf(const Eigen::Ref<const Mat>& A, const Eigen::Ref<const Mat>& B,
                    Eigen::Ref<Mat> X) {
  const int n = static_cast<int>(B.rows());
  int j = n - 1;
  while (j >= 0) {
    const bool pair = j > 0 && B(j, j - 1) != 0.0;
    const int j0 = pair ? j - 1 : j;
    const int w = pair ? 2 : 1;
    const int rest = n - j - 1;
    if (rest > 0)
      X.middleCols(j0, w).noalias() -=
          X.rightCols(rest) * B.block(j0, j + 1, w, rest).transpose();
    if (!pair) {
      Vec r = X.col(j);
      shifted_backsolve<double>(A, B(j, j), r);
      X.col(j) = r;
    } else {
      // Diagonalize M = B_JJ^T = W diag(l, conj(l)) W^{-1}; then Z = Y W
      // decouples into (A + l I) z = (R W)_0 and its conjugate.
      const double a = B(j0, j0), b = B(j, j0), c = B(j0, j), d = B(j, j);  // M = [[a,b],[c,d]]
      const double tr = 0.5 * (a + d), disc = 0.25 * (a - d) * (a - d) + b * c;
      if (disc >= 0.0) throw NumericalError("2x2 Schur block with real eigenvalues");
      const cplx l(tr, std::sqrt(-disc));
      const cplx w0 = std::abs(b) > std::abs(c) ? cplx(b) : l - d;
      const cplx w1 = std::abs(b) > std::abs(c) ? l - a : cplx(c);
      // W = [[w0, conj(w0)], [w1, conj(w1)]]
      const cplx detW = w0 * std::conj(w1) - std::conj(w0) * w1;
      CVec rhs = X.col(j0).cast<cplx>() * w0 + X.col(j).cast<cplx>() * w1;
      shifted_backsolve<cplx>(A, l, rhs);
      // Y = Z W^{-1} with Z = [z, conj(z)], W^{-1} = [[conj(w1), -conj(w0)], [-w1, w0]] / detW
      const CVec zc = rhs.conjugate();
      X.col(j0) = ((rhs * std::conj(w1) - zc * w1) / detW).real();
      X.col(j) = ((-rhs * std::conj(w0) + zc * w0) / detW).real();
    }
    j = j0 - 1;
  }
}

void sylvester_rec(const Eigen::Ref<const Mat>& A, const Eigen::Ref<const Mat>& B,
                   Eigen::Ref<Mat> X) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(B.rows());
  if (m == 0 || n == 0) return;
  if (m <= kLeaf && n <= kLeaf) {
    sylvester_leaf(A, B, X);
    return;
  }
  if (m >= n) {
    const int h = split_point(A, m / 2);
    sylvester_rec(A.bottomRightCorner(m - h, m - h), B, X.bottomRows(m - h));
    X.topRows(h).noalias() -= A.topRightCorner(h, m - h) * X.bottomRows(m - h);
    sylvester_rec(A.topLeftCorner(h, h), B, X.topRows(h));
  } else {
    const int h = split_point(B, n / 2);
    sylvester_rec(A, B.bottomRightCorner(n - h, n - h), X.rightCols(n - h));
    X.leftCols(h).noalias() -= X.rightCols(n - h) * B.topRightCorner(h, n - h).transpose();
    sylvester_rec(A, B.topLeftCorner(h, h), X.leftCols(h));
  }
}

}  // namespace

SchurForm real_schur(const Mat& A, SchurOrder order) {
  check_square(A, "matrix");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  SchurForm s;
  s.T = A;
  s.U.resize(n, n);
  if (n == 0) return s;
  Vec wr(n), wi(n);
  lapack_int sdim = 0;
  const bool sort = order == SchurOrder::LeftHalfPlane;
  const lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', sort ? 'S' : 'N', sort ? left_half_plane : nullptr, n,
                    s.T.data(), n, &sdim, wr.data(), wi.data(), s.U.data(), n);
  // info == n+2 flags that reordering changed a near-imaginary eigenvalue's
  // classification; the ordering is still usable but the caller must check.
  if (info != 0 && info != n + 2) check_info(info, "dgees");
  s.selected = static_cast<int>(sdim);
  // Clean the strictly lower part below the subdiagonal.
  for (int j = 0; j < n; ++j)
    for (int i = j + 2; i < n; ++i) s.T(i, j) = 0.0;
  return s;
}

CVec eigenvalues(const Mat& A) {
  check_square(A, "matrix");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Mat work = A;
  Vec wr(n), wi(n);
  if (n == 0) return CVec();
  check_info(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(),
                           nullptr, 1, nullptr, 1),
             "dgeev");
  CVec out(n);
  for (int i = 0; i < n; ++i) out[i] = cplx(wr[i], wi[i]);
  return out;
}

CVec generalized_eigenvalues(const Mat& A, const Mat& E) {
  check_square(A, "matrix");
  if (E.rows() != A.rows() || E.cols() != A.cols()) throw std::invalid_argument("pencil size mismatch");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Mat a = A, b = E;
  Vec ar(n), ai(n), be(n);
  check_info(LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, b.data(), n, ar.data(),
                           ai.data(), be.data(), nullptr, 1, nullptr, 1),
             "dggev");
  std::vector<cplx> out;
  const double scale = std::max(1.0, E.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    if (std::abs(be[i]) > 1e-13 * scale) out.emplace_back(ar[i] / be[i], ai[i] / be[i]);
  return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

double spectral_abscissa(const Mat& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  return eigenvalues(A).real().maxCoeff();
}

SymmetricEigen symmetric_eigen(const Mat& A) {
  check_square(A, "symmetric eigenproblem");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  SymmetricEigen out;
  out.vectors = A;
  out.values.resize(n);
  if (n == 0) return out;
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data()),
             "dsyevd");
  return out;
}

Svd svd(const Mat& A) {
  const lapack_int m = static_cast<lapack_int>(A.rows()), n = static_cast<lapack_int>(A.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.U.resize(m, k);
  out.s.resize(k);
  Mat vt(k, n);
  if (k == 0) {
    out.V.resize(n, 0);
    return out;
  }
  Mat work = A;
  check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.s.data(),
                            out.U.data(), m, vt.data(), k),
             "dgesdd");
  out.V = vt.transpose();
  return out;
}

void solve_quasi_triangular_sylvester(const Mat& A, const Mat& B, Mat& G) {
  if (G.rows() != A.rows() || G.cols() != B.rows())
    throw std::invalid_argument("Sylvester right-hand side has wrong shape");
  sylvester_rec(A, B, G);
}

Mat solve_lyapunov(const SchurForm& schur, const Mat& W, bool transpose) {
  const int n = static_cast<int>(schur.T.rows());
  if (W.rows() != n || W.cols() != n) throw std::invalid_argument("Lyapunov right-hand side has wrong shape");
  if (!transpose) {
    // T Y + Y T^T = -U^T W U, X = U Y U^T
    Mat F = -(schur.U.transpose() * W * schur.U);
    solve_quasi_triangular_sylvester(schur.T, schur.T, F);
    Mat X = schur.U * F * schur.U.transpose();
    return 0.5 * (X + X.transpose());
  }
  // A^T = U T^T U^T; T^T is lower quasi-triangular, and reversing the index
  // order makes it upper again: T' = P T^T P.
  const Mat Tp = schur.T.transpose().colwise().reverse().rowwise().reverse();
  Mat F = -(schur.U.transpose() * W * schur.U);
  F = F.colwise().reverse().rowwise().reverse().eval();
  solve_quasi_triangular_sylvester(Tp, Tp, F);
  F = F.colwise().reverse().rowwise().reverse().eval();
  Mat X = schur.U * F * schur.U.transpose();
  return 0.5 * (X + X.transpose());
}

Mat solve_lyapunov(const Mat& A, const Mat& W) {
  check_square(A, "Lyapunov matrix");
  return solve_lyapunov(real_schur(A), W, false);
}

HessenbergResolvent::HessenbergResolvent(const Mat& A, const Mat& B, const Mat& C) {
  check_square(A, "resolvent matrix");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (B.rows() != n || C.cols() != n) throw std::invalid_argument("resolvent B/C size mismatch");
  H_ = A;
  Mat Q;
  if (n > 0) {
    Vec tau(std::max<lapack_int>(n - 1, 1));
    check_info(LAPACKE_dgehrd(LAPACK_COL_MAJOR, n, 1, n, H_.data(), n, tau.data()), "dgehrd");
    Q = H_;
    check_info(LAPACKE_dorghr(LAPACK_COL_MAJOR, n, 1, n, Q.data(), n, tau.data()), "dorghr");
    for (int j = 0; j < n; ++j)
      for (int i = j + 2; i < n; ++i) H_(i, j) = 0.0;
  } else {
    Q.resize(0, 0);
  }
  QtB_ = Q.transpose() * B;
  CQ_ = C * Q;
}

CMat HessenbergResolvent::operator()(cplx s) const {
  const int n = order();
  // Row-major copy of sI - H; Gaussian elimination with adjacent-row pivoting
  // keeps the Hessenberg structure.
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> M = -H_.cast<cplx>();
  M.diagonal().array() += s;
  CMat X = QtB_.cast<cplx>();
  for (int k = 0; k + 1 < n; ++k) {
    if (std::abs(M(k + 1, k)) > std::abs(M(k, k))) {
      M.row(k).segment(k, n - k).swap(M.row(k + 1).segment(k, n - k));
      X.row(k).swap(X.row(k + 1));
    }
    if (M(k, k) == cplx(0.0)) throw NumericalError("sI - A is singular");
    const cplx f = M(k + 1, k) / M(k, k);
    if (f != cplx(0.0)) {
      M.row(k + 1).segment(k, n - k) -= f * M.row(k).segment(k, n - k);
      X.row(k + 1) -= f * X.row(k);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    if (M(k, k) == cplx(0.0)) throw NumericalError("sI - A is singular");
    if (k + 1 < n) X.row(k) -= M.row(k).segment(k + 1, n - k - 1) * X.bottomRows(n - k - 1);
    X.row(k) /= M(k, k);
  }
  return CQ_.cast<cplx>() * X;
}

}  // namespace roomreg
