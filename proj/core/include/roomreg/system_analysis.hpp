#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roomreg/eigen_analysis.hpp"

namespace roomreg {

enum class HautusSide { Detectability, Stabilizability };

struct HautusVerdict {
  cplx lambda;
  double sigma_min = 0.0;  // smallest singular value of M V (or M^T W)
  double threshold = 0.0;
  int geometric_multiplicity = 0;
  bool defective = false;  // algebraic multiplicity exceeds the eigenspace dimension
  bool pass = false;
};

/// Hautus test at each candidate eigenvalue of the pencil (A, E). V spans
/// ker(A - lambda E) (detectability, M = C) or ker((A - lambda E)^H)
/// (stabilizability, M = B). PASS when sigma_min > rel_threshold * ||M||_2.
/// E may be empty (identity). Dense version for small systems.
std::vector<HautusVerdict> hautus_check(const Mat& A, const Mat& E, const Mat& M, HautusSide side,
                                        const std::vector<cplx>& candidates,
                                        double rel_threshold = 1e-8);
/// Sparse version; each candidate is taken as geometrically simple and its
/// eigenvector is recomputed by inverse iteration.
std::vector<HautusVerdict> hautus_check(const SpMat& A, const SpMat& E, const Mat& M,
                                        HautusSide side, const std::vector<cplx>& candidates,
                                        double rel_threshold = 1e-8);

struct AssumptionItem {
  std::string id;  // e.g. "det(iii)", "stab(ii)", "zero(w=0.5)"
  std::string description;
  cplx point;
  double sigma_min = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct AssumptionReport {
  SpectralReport plant_spectrum;  // closed right half-plane of A_b
  std::vector<AssumptionItem> items;
  bool all_pass() const;
};

/// Checks the disjointness, detectability, stabilizability and
/// transmission-zero conditions of the cascade blocks. Failures are
/// reported, never thrown; a frequency inside the spectrum of A_b is
/// reported as a failed item with a note.
AssumptionReport cascade_assumption_check(const SparseSystem& plant, const ActuatorSensor& as,
                                          const std::vector<double>& frequencies,
                                          const EigenOptions& options = {},
                                          double rel_threshold = 1e-8);

/// CSV tables: index,re,im,residual,block and id,re,im,sigma_min,threshold,verdict,note.
void write_spectral_report(const std::filesystem::path& path, const SpectralReport& report);
void write_assumption_report(const std::filesystem::path& path, const AssumptionReport& report);

}  // namespace roomreg
