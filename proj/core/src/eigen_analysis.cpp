#include "roomreg/eigen_analysis.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <Eigen/SparseLU>

#include "roomreg/dense_linalg.hpp"

namespace roomreg {
namespace {

// (A - sigma E)^{-1} for real A, E and complex sigma.
class ShiftedSolver {
 public:
  ShiftedSolver(const SpMat& A, const SpMat& E, cplx sigma, bool transpose) {
    CSpMat K = A.cast<cplx>() - sigma * E.cast<cplx>();
    if (transpose) K = CSpMat(K.transpose());
    K.makeCompressed();
    sparse_.compute(K);
    if (sparse_.info() != Eigen::Success)
      throw NumericalError("shifted pencil is singular at the requested shift");
    is_sparse_ = true;
  }
  ShiftedSolver(const Mat& A, const Mat& E, cplx sigma, bool transpose) {
    CMat K = A.cast<cplx>() - sigma * E.cast<cplx>();
    if (transpose) K.transposeInPlace();
    dense_.compute(K);
  }
  CVec solve(const CVec& b) const { return is_sparse_ ? CVec(sparse_.solve(b)) : CVec(dense_.solve(b)); }

 private:
  bool is_sparse_ = false;
  Eigen::SparseLU<CSpMat> sparse_;
  Eigen::PartialPivLU<CMat> dense_;
};

template <class Matrix>
CVec mul(const Matrix& M, const CVec& x) {
  CVec y(M.rows());
  y.real() = M * x.real();
  y.imag() = M * x.imag();
  return y;
}

template <class Matrix>
double residual(const Matrix& A, const Matrix& E, cplx lambda, const CVec& x) {
  return (mul(A, x) - lambda * mul(E, x)).norm() / x.norm();
}

CVec random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(d(rng), d(rng));
  return v.normalized();
}

template <class Matrix>
EigenPair refine(const Matrix& A, const Matrix& E, cplx lambda, CVec x, int steps, double tol) {
  // Exact eigenvalue shifts make the factorization numerically singular.
  const cplx sigma = lambda + cplx(1e-10 * (1.0 + std::abs(lambda)), 0.0);
  ShiftedSolver K(A, E, sigma, false);
  if (x.size() == 0) x = random_vector(A.rows(), 7);
  EigenPair best{lambda, x.normalized(), residual(A, E, lambda, x)};
  for (int s = 0; s < steps && best.residual > tol; ++s) {
    x = K.solve(mul(E, x));
    const double nx = x.norm();
    if (!(nx > 0.0) || !std::isfinite(nx)) break;
    x /= nx;
    const cplx den = x.dot(mul(E, x));
    if (std::abs(den) == 0.0) break;
    lambda = x.dot(mul(A, x)) / den;
    const double r = residual(A, E, lambda, x);
    if (r < best.residual) best = {lambda, x, r};
  }
  return best;
}

bool contains(const std::vector<EigenPair>& pairs, cplx lambda) {
  return std::any_of(pairs.begin(), pairs.end(), [&](const EigenPair& p) {
    return std::abs(p.value - lambda) <= 1e-6 * (1.0 + std::abs(lambda));
  });
}

void add_with_conjugate(std::vector<EigenPair>& pairs, EigenPair p) {
  if (contains(pairs, p.value)) return;
  const bool real = std::abs(p.value.imag()) <= 1e-10 * (1.0 + std::abs(p.value));
  if (real) p.value = cplx(p.value.real(), 0.0);
  pairs.push_back(p);
  if (!real) pairs.push_back({std::conj(p.value), p.vector.conjugate(), p.residual});
}

template <class Matrix>
SpectralReport compute(const Matrix& A, const Matrix& E, double margin, const EigenOptions& opt) {
  if (!(margin >= 0.0)) throw std::invalid_argument("margin must be non-negative");
  if (A.rows() != A.cols() || E.rows() != A.rows() || E.cols() != A.cols())
    throw std::invalid_argument("pencil matrices must be square and of equal size");
  const int n = static_cast<int>(A.rows());
  SpectralReport rep;
  rep.margin = margin;
  std::vector<EigenPair> pairs;
  std::vector<std::string> failures;
  auto certify = [&](cplx lambda, const CVec& start) {
    EigenPair p{lambda, start, start.size() ? residual(A, E, lambda, start) : 1.0};
    if (start.size() == 0 || p.residual > opt.residual_tol)
      p = refine(A, E, lambda, start, opt.refine_steps, opt.residual_tol);
    if (p.residual > opt.residual_tol) {
      std::ostringstream os;
      os << lambda << " (residual " << p.residual << ")";
      failures.push_back(os.str());
      return;
    }
    if (p.value.real() > -margin) add_with_conjugate(pairs, p);
  };

  if (n < opt.dense_threshold) {
    rep.method = "dense QZ + inverse iteration";
    rep.subspace_dim = n;
    const CVec ev = generalized_eigenvalues(Mat(A), Mat(E));
    for (const cplx l : ev)
      if (l.real() > -margin && l.imag() >= 0.0 && !contains(pairs, l)) certify(l, CVec());
  } else {
    rep.method = "shift-invert Arnoldi";
    rep.shifts = opt.shifts;
    const int k = std::min(opt.krylov_dim, n - 1);
    rep.subspace_dim = k;
    unsigned seed = 1;
    for (const cplx sigma : opt.shifts) {
      if (sigma.imag() < 0.0) continue;
      const ShiftedSolver K(A, E, sigma, false);
      CMat V(n, k + 1);
      CMat H = CMat::Zero(k + 1, k);
      // A first application removes components along infinite eigenvalues.
      V.col(0) = K.solve(mul(E, random_vector(n, seed++))).normalized();
      int m = k;
      for (int j = 0; j < k; ++j) {
        CVec w = K.solve(mul(E, CVec(V.col(j))));
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i <= j; ++i) {
            const cplx hij = V.col(i).dot(w);
            H(i, j) += hij;
            w -= hij * V.col(i);
          }
        H(j + 1, j) = w.norm();
        if (std::abs(H(j + 1, j)) <= 1e-14 * H.col(j).norm()) {
          m = j + 1;
          break;
        }
        V.col(j + 1) = w / H(j + 1, j);
      }
      Eigen::ComplexEigenSolver<CMat> es(H.topLeftCorner(m, m));
      const double beta = std::abs(H(m, m - 1));
      for (int i = 0; i < m; ++i) {
        const cplx mu = es.eigenvalues()[i];
        if (std::abs(mu) < 1e-12) continue;
        const CVec y = es.eigenvectors().col(i);
        const double estimate = beta * std::abs(y[m - 1]) / y.norm();
        if (m < k || estimate <= 1e-6 * std::abs(mu)) {
          const cplx lambda = sigma + 1.0 / mu;
          if (lambda.real() > -margin && !contains(pairs, lambda))
            certify(lambda, (V.leftCols(m) * y).normalized());
        }
      }
    }
  }
  if (!failures.empty()) {
    std::string msg = "eigensolver did not reach the residual tolerance for";
    for (const auto& f : failures) msg += " " + f;
    throw NumericalError(msg);
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (std::abs(a.value.real() - b.value.real()) > 1e-9 * (1.0 + std::abs(a.value)))
      return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  rep.pairs = std::move(pairs);
  rep.blocks.assign(rep.pairs.size(), StateBlock::Plant);
  return rep;
}

void classify(SpectralReport& rep, const CascadeLayout& L) {
  for (size_t i = 0; i < rep.pairs.size(); ++i) {
    const CVec& x = rep.pairs[i].vector;
    if (x.segment(L.actuator, L.n_actuator).norm() > 1e-6) rep.blocks[i] = StateBlock::Actuator;
    else if (x.segment(L.plant, L.n_plant).norm() > 1e-6) rep.blocks[i] = StateBlock::Plant;
    else rep.blocks[i] = StateBlock::Sensor;
  }
}

}  // namespace

const char* to_string(StateBlock b) {
  switch (b) {
    case StateBlock::Plant: return "plant";
    case StateBlock::Actuator: return "actuator";
    case StateBlock::Sensor: return "sensor";
  }
  return "?";
}

int SpectralReport::count(StateBlock b) const {
  return static_cast<int>(std::count(blocks.begin(), blocks.end(), b));
}

std::vector<cplx> SpectralReport::values() const {
  std::vector<cplx> v;
  for (const auto& p : pairs) v.push_back(p.value);
  return v;
}

SpectralReport unstable_spectrum(const SpMat& A, const SpMat& E, double margin,
                                 const EigenOptions& options) {
  return compute(A, E, margin, options);
}

SpectralReport unstable_spectrum(const Mat& A, const Mat& E, double margin,
                                 const EigenOptions& options) {
  return compute(A, E.size() ? E : Mat(Mat::Identity(A.rows(), A.cols())), margin, options);
}

SpectralReport unstable_spectrum(const SparseCascade& c, double margin, const EigenOptions& options) {
  SpectralReport rep = compute(c.sys.A, c.sys.E, margin, options);
  classify(rep, c.layout);
  return rep;
}

SpectralReport unstable_spectrum(const DenseCascade& c, double margin, const EigenOptions& options) {
  SpectralReport rep = unstable_spectrum(c.sys.A, c.sys.E, margin, options);
  classify(rep, c.layout);
  return rep;
}

EigenPair refine_eigenpair(const SpMat& A, const SpMat& E, cplx lambda, int steps, bool adjoint) {
  if (!adjoint) return refine(A, E, lambda, CVec(), steps, 0.0);
  const SpMat At = A.transpose(), Et = E.transpose();
  EigenPair p = refine(At, Et, std::conj(lambda), CVec(), steps, 0.0);
  p.value = std::conj(p.value);
  return p;
}

}  // namespace roomreg
