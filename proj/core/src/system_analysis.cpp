#include "roomreg/system_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "roomreg/dense_linalg.hpp"

namespace roomreg {
namespace {

double norm2(const Mat& M) {
  if (M.size() == 0) return 0.0;
  const Mat G = M.rows() <= M.cols() ? Mat(M * M.transpose()) : Mat(M.transpose() * M);
  return std::sqrt(std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat>(G).eigenvalues().maxCoeff()));
}

double norm2(const CMat& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMat>(M).singularValues()(0);
}

// Smallest of the k singular values of a q x k matrix; zero when k > q.
double sigma_min(const CMat& MV) {
  if (MV.cols() == 0) return 0.0;
  if (MV.cols() > MV.rows()) return 0.0;
  return Eigen::JacobiSVD<CMat>(MV).singularValues().minCoeff();
}

CMat kernel_basis(const CMat& K) {
  Eigen::JacobiSVD<CMat> svd(K, Eigen::ComputeFullV);
  const Vec s = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, s(0));
  int k = 0;
  for (Eigen::Index i = s.size() - 1; i >= 0 && s(i) <= tol; --i) ++k;
  // The candidate is meant to be an eigenvalue; keep the closest direction.
  k = std::max(k, 1);
  return svd.matrixV().rightCols(k);
}

int algebraic_multiplicity(const Mat& A, const Mat& E, cplx lambda) {
  const CVec ev = generalized_eigenvalues(A, E);
  int c = 0;
  for (const cplx l : ev)
    if (std::abs(l - lambda) <= 1e-6 * (1.0 + std::abs(lambda))) ++c;
  return c;
}

std::vector<cplx> closed_rhp(const CVec& ev) {
  std::vector<cplx> out;
  for (const cplx l : ev)
    if (l.real() > -1e-9) out.push_back(l);
  return out;
}

std::string format(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

std::vector<HautusVerdict> hautus_check(const Mat& A, const Mat& E_in, const Mat& M,
                                        HautusSide side, const std::vector<cplx>& candidates,
                                        double rel_threshold) {
  const Eigen::Index n = A.rows();
  const Mat E = E_in.size() ? E_in : Mat(Mat::Identity(n, n));
  if (A.cols() != n || E.rows() != n || E.cols() != n)
    throw std::invalid_argument("hautus_check: pencil must be square");
  const bool det = side == HautusSide::Detectability;
  if ((det && M.cols() != n) || (!det && M.rows() != n))
    throw std::invalid_argument("hautus_check: test matrix does not match the state dimension");
  const double thr = rel_threshold * norm2(M);
  const CMat Mc = det ? CMat(M.cast<cplx>()) : CMat(M.transpose().cast<cplx>());
  std::vector<HautusVerdict> out;
  for (const cplx l : candidates) {
    CMat K = A.cast<cplx>() - l * E.cast<cplx>();
    if (!det) K.adjointInPlace();
    const CMat V = kernel_basis(K);
    HautusVerdict v;
    v.lambda = l;
    v.geometric_multiplicity = static_cast<int>(V.cols());
    if (n <= 500) v.defective = algebraic_multiplicity(A, E, l) > v.geometric_multiplicity;
    v.sigma_min = sigma_min(Mc * V);
    v.threshold = thr;
    v.pass = v.sigma_min > thr;
    out.push_back(v);
  }
  return out;
}

std::vector<HautusVerdict> hautus_check(const SpMat& A, const SpMat& E, const Mat& M,
                                        HautusSide side, const std::vector<cplx>& candidates,
                                        double rel_threshold) {
  const bool det = side == HautusSide::Detectability;
  if ((det && M.cols() != A.rows()) || (!det && M.rows() != A.rows()))
    throw std::invalid_argument("hautus_check: test matrix does not match the state dimension");
  const double thr = rel_threshold * norm2(M);
  std::vector<HautusVerdict> out;
  for (const cplx l : candidates) {
    const EigenPair p = refine_eigenpair(A, E, l, 6, !det);
    HautusVerdict v;
    v.lambda = l;
    v.geometric_multiplicity = 1;
    const CMat Mc = det ? CMat(M.cast<cplx>()) : CMat(M.transpose().cast<cplx>());
    v.sigma_min = (Mc * p.vector).norm();
    v.threshold = thr;
    v.pass = v.sigma_min > thr;
    out.push_back(v);
  }
  return out;
}

bool AssumptionReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const AssumptionItem& i) { return i.pass; });
}

AssumptionReport cascade_assumption_check(const SparseSystem& plant, const ActuatorSensor& as,
                                          const std::vector<double>& frequencies,
                                          const EigenOptions& options, double rel_threshold) {
  as.validate(plant.inputs(), plant.outputs());
  AssumptionReport rep;
  rep.plant_spectrum = unstable_spectrum(plant.A, plant.E, 1e-9, options);
  const std::vector<cplx> ev_b = rep.plant_spectrum.values();
  const std::vector<cplx> ev_a = closed_rhp(eigenvalues(as.A_a));
  const std::vector<cplx> ev_s = closed_rhp(eigenvalues(as.A_s));
  auto P_a = [&](cplx s) { return transfer_function(as.A_a, as.B_a, as.C_a, s); };
  auto P_s = [&](cplx s) { return transfer_function(as.A_s, as.B_s, as.C_s, s); };
  auto P_b = [&](cplx s) { return transfer_function(plant, std::vector<cplx>{s}).front(); };
  auto add = [&](AssumptionItem item) {
    item.pass = item.pass && item.sigma_min > item.threshold;
    rep.items.push_back(std::move(item));
  };

  {
    AssumptionItem it{"disjoint", "unstable spectra of A_b, A_a, A_s pairwise disjoint", {}, 0, 0, true, ""};
    double dmin = std::numeric_limits<double>::infinity();
    const std::vector<const std::vector<cplx>*> sets{&ev_b, &ev_a, &ev_s};
    for (size_t i = 0; i < sets.size(); ++i)
      for (size_t j = i + 1; j < sets.size(); ++j)
        for (const cplx a : *sets[i])
          for (const cplx b : *sets[j])
            if (std::abs(a - b) < dmin) {
              dmin = std::abs(a - b);
              it.point = a;
            }
    if (!std::isfinite(dmin)) {
      it.sigma_min = 1.0;
      it.note = "at most one block has closed right half-plane spectrum";
    } else {
      it.sigma_min = dmin;
    }
    it.threshold = 1e-8;
    add(it);
  }

  auto hautus_items = [&](const char* id, const char* what, const Mat& A, const Mat& M,
                          HautusSide side, const std::vector<cplx>& ev) {
    if (ev.empty()) {
      add({id, what, {}, 1.0, 0.0, true, "no eigenvalues in the closed right half-plane"});
      return;
    }
    for (const auto& v : hautus_check(A, Mat(), M, side, ev, rel_threshold))
      add({id, what, v.lambda, v.sigma_min, v.threshold, true, v.defective ? "defective" : ""});
  };
  hautus_items("det(ii)", "(A_s, C_s) detectable", as.A_s, as.C_s, HautusSide::Detectability, ev_s);
  hautus_items("stab(ii)", "(A_a, B_a) stabilizable", as.A_a, as.B_a, HautusSide::Stabilizability,
               ev_a);

  for (size_t i = 0; i < rep.plant_spectrum.pairs.size(); ++i) {
    const cplx mu = rep.plant_spectrum.pairs[i].value;
    const CVec& v = rep.plant_spectrum.pairs[i].vector;
    const CMat PsCb = P_s(mu) * plant.C.cast<cplx>();
    add({"det(iii)", "N(P_s(l) C_b) and N(l - A_b) intersect trivially", mu, (PsCb * v).norm(),
         rel_threshold * norm2(PsCb), true, ""});
    const EigenPair w = refine_eigenpair(plant.A, plant.E, mu, 6, true);
    const CMat PaBb = P_a(mu).adjoint() * plant.B.transpose().cast<cplx>();
    add({"stab(iii)", "N(P_a(l)^* B_b^*) and N(l - A_b^*) intersect trivially", std::conj(mu),
         (PaBb * w.vector).norm(), rel_threshold * norm2(PaBb), true, ""});
  }

  for (const cplx l : ev_a) {
    AssumptionItem it{"det(iv)", "N(P_s P_b C_a) and N(l - A_a) intersect trivially", l, 0, 0, true, ""};
    try {
      const CMat M = P_s(l) * P_b(l) * as.C_a.cast<cplx>();
      const CMat V = kernel_basis(as.A_a.cast<cplx>() - l * CMat::Identity(as.A_a.rows(), as.A_a.rows()));
      it.sigma_min = sigma_min(M * V);
      it.threshold = rel_threshold * norm2(M);
    } catch (const NumericalError&) {
      it.pass = false;
      it.note = "resolvent of A_b unavailable at this point";
    }
    add(it);
  }
  for (const cplx l : ev_s) {
    AssumptionItem it{"stab(iv)", "N(P_a^* P_b^* B_s^*) and N(l - A_s^*) intersect trivially",
                      std::conj(l), 0, 0, true, ""};
    try {
      const CMat M = P_a(l).adjoint() * P_b(l).adjoint() * as.B_s.transpose().cast<cplx>();
      const CMat K = (as.A_s.cast<cplx>() - l * CMat::Identity(as.A_s.rows(), as.A_s.rows())).adjoint();
      it.sigma_min = sigma_min(M * kernel_basis(K));
      it.threshold = rel_threshold * norm2(M);
    } catch (const NumericalError&) {
      it.pass = false;
      it.note = "resolvent of A_b unavailable at this point";
    }
    add(it);
  }

  const int m = static_cast<int>(as.B_a.cols()), p = static_cast<int>(as.C_s.rows());
  for (const double w : frequencies) {
    const cplx s(0.0, w);
    std::ostringstream id;
    id << "zero(w=" << w << ")";
    AssumptionItem it{id.str(), "P(i w) surjective", s, 0, 0, true, ""};
    try {
      const CMat P = P_s(s) * P_b(s) * P_a(s);
      if (m < p) {
        it.pass = false;
        it.note = "fewer inputs than outputs";
      } else {
        const Vec sv = Eigen::JacobiSVD<CMat>(P).singularValues();
        it.sigma_min = sv(p - 1);
        it.threshold = rel_threshold * sv(0);
      }
    } catch (const NumericalError&) {
      it.pass = false;
      it.note = "i w lies in the spectrum of A_b";
    }
    add(it);
  }
  return rep;
}

void write_spectral_report(const std::filesystem::path& path, const SpectralReport& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  out << "# method=" << r.method << " margin=" << r.margin << " subspace=" << r.subspace_dim;
  if (!r.shifts.empty()) {
    out << " shifts=";
    for (size_t i = 0; i < r.shifts.size(); ++i) out << (i ? ";" : "") << format(r.shifts[i]);
  }
  out << "\nindex,re,im,residual,block\n";
  for (size_t i = 0; i < r.pairs.size(); ++i)
    out << i << ',' << r.pairs[i].value.real() << ',' << r.pairs[i].value.imag() << ','
        << r.pairs[i].residual << ',' << to_string(r.blocks[i]) << '\n';
}

void write_assumption_report(const std::filesystem::path& path, const AssumptionReport& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  out << "id,re,im,sigma_min,threshold,verdict,note\n";
  for (const auto& it : r.items)
    out << it.id << ',' << it.point.real() << ',' << it.point.imag() << ',' << it.sigma_min << ','
        << it.threshold << ',' << (it.pass ? "PASS" : "FAIL") << ',' << it.note << '\n';
}

}  // namespace roomreg
