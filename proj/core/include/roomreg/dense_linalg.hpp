#pragma once

#include "roomreg/types.hpp"

namespace roomreg {

/// A = U T U^T with T upper quasi-triangular (real Schur form).
struct SchurForm {
  Mat T, U;
  int selected = 0;  // leading eigenvalues satisfying the ordering predicate
};

enum class SchurOrder { None, LeftHalfPlane };

/// LAPACK dgees; with LeftHalfPlane the eigenvalues with negative real part
/// come first and `selected` counts them.
SchurForm real_schur(const Mat& A, SchurOrder order = SchurOrder::None);

CVec eigenvalues(const Mat& A);
/// Finite eigenvalues of the pencil (A, E) (LAPACK dggev).
CVec generalized_eigenvalues(const Mat& A, const Mat& E);
double spectral_abscissa(const Mat& A);

struct Svd {
  Mat U, V;
  Vec s;  // descending
};
struct SymmetricEigen {
  Vec values;  // ascending
  Mat vectors;
};
/// Symmetric eigendecomposition via LAPACK dsyevd.
SymmetricEigen symmetric_eigen(const Mat& A);

/// Thin SVD via LAPACK dgesdd.
Svd svd(const Mat& A);

/// Solves A X + X B^T = G for upper quasi-triangular A and B by recursive
/// blocking; the result overwrites G.
void solve_quasi_triangular_sylvester(const Mat& A, const Mat& B, Mat& G);

/// A X + X A^T + W = 0 (W symmetric). Throws NumericalError if A has
/// eigenvalues symmetric about the imaginary axis.
Mat solve_lyapunov(const Mat& A, const Mat& W);
/// Same with a precomputed Schur form of A; transpose=true solves
/// A^T X + X A + W = 0 instead.
Mat solve_lyapunov(const SchurForm& schur, const Mat& W, bool transpose = false);

/// Evaluates C (sI - A)^{-1} B at many points after one Hessenberg reduction;
/// each evaluation costs O(n^2 (m + 1)).
class HessenbergResolvent {
 public:
  HessenbergResolvent(const Mat& A, const Mat& B, const Mat& C);
  CMat operator()(cplx s) const;
  int order() const { return static_cast<int>(H_.rows()); }

 private:
  Mat H_;
  Mat QtB_, CQ_;
};

}  // namespace roomreg
