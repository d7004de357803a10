#pragma once

#include <string>
#include <vector>

#include "roomreg/cascade.hpp"

namespace roomreg {

struct EigenOptions {
  /// Shift-invert centres. Only shifts with Im >= 0 are used: the matrices
  /// are real, so conjugate shifts would find the conjugate eigenvalues.
  std::vector<cplx> shifts{cplx(0.0, 0.0), cplx(0.0, 0.5), cplx(0.0, 1.0)};
  int krylov_dim = 80;
  double residual_tol = 1e-8;  // on ||A x - lambda E x|| with ||x|| = 1
  int dense_threshold = 2000;  // below this a dense QZ supplies the candidates
  int refine_steps = 6;
};

struct EigenPair {
  cplx value;
  CVec vector;  // unit 2-norm
  double residual = 0.0;
};

enum class StateBlock { Plant, Actuator, Sensor };
const char* to_string(StateBlock b);

struct SpectralReport {
  std::vector<EigenPair> pairs;  // descending real part, conjugates adjacent
  std::vector<StateBlock> blocks;  // per pair; Plant when no layout is known
  double margin = 0.0;
  std::string method;
  std::vector<cplx> shifts;
  int subspace_dim = 0;

  int count(StateBlock b) const;
  std::vector<cplx> values() const;
};

/// All certified eigenpairs of the pencil (A, E) with Re lambda > -margin
/// that the shift set reaches. Throws NumericalError listing residuals when
/// a converged Ritz value cannot be certified.
SpectralReport unstable_spectrum(const SpMat& A, const SpMat& E, double margin,
                                 const EigenOptions& options = {});
SpectralReport unstable_spectrum(const Mat& A, const Mat& E, double margin,
                                 const EigenOptions& options = {});
/// Classifies each pair by the cascade block it originates from.
SpectralReport unstable_spectrum(const SparseCascade& c, double margin,
                                 const EigenOptions& options = {});
SpectralReport unstable_spectrum(const DenseCascade& c, double margin,
                                 const EigenOptions& options = {});

/// Inverse iteration at a fixed shift near lambda; returns the refined pair.
/// With `adjoint` the left eigenvector (w^H (A - lambda E) = 0) is returned.
EigenPair refine_eigenpair(const SpMat& A, const SpMat& E, cplx lambda, int steps = 6,
                           bool adjoint = false);

}  // namespace roomreg
