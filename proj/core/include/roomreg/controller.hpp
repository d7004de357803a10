#pragma once

#include <filesystem>
#include <vector>

#include "roomreg/balanced_truncation.hpp"
#include "roomreg/cascade.hpp"
#include "roomreg/internal_model.hpp"
#include "roomreg/riccati.hpp"

namespace roomreg {

/// Weights left empty default to identities. The synthesis plant is in
/// standard form (E = I, mass-orthonormal coordinates), so identity weights
/// there are the mass-weighted identities of the physical space.
struct SynthesisParams {
  double alpha1 = 0.3;
  double alpha2 = 0.2;
  Mat R1, R2;
  Mat Q0;        // internal-model output weight, rows x dim Z_im
  Mat Q1Q1t;     // filter state weight
  Mat Q2tQ2;     // control state weight
  int order = 20;  // balanced truncation order r
};

struct Gains {
  Mat L;       // N x p
  Mat K1, K2;  // m x dim Z_im, m x N
  CareSolution filter;   // Sigma
  CareSolution control;  // Pi
  Mat Ac, Bc;            // augmented design system
};

Gains compute_gains(const DenseSystem& sys, const InternalModel& im, const SynthesisParams& params);

struct ControllerRealization {
  Mat G1, G2;             // internal model
  Mat K1;
  Mat A_L, B_L, L_r, K2_r;
  Mat cal_G1, cal_G2, K;  // z' = cal_G1 z + cal_G2 e,  u = K z
  std::vector<double> frequencies;
  Vec hankel;
  double truncation_bound = 0.0;
  int dim_zim = 0;
  int r = 0;

  int dim() const { return static_cast<int>(cal_G1.rows()); }
  int inputs() const { return static_cast<int>(K.rows()); }
  int outputs() const { return static_cast<int>(cal_G2.cols()); }
};

/// cal_G1 = [[G1, 0], [B_L K1, A_L + B_L K2_r]], cal_G2 = [G2; -L_r],
/// K = [K1, K2_r]. r = 0 gives the internal model alone.
ControllerRealization assemble_controller(const InternalModel& im, const Mat& K1, const Mat& A_L,
                                          const Mat& B_L, const Mat& L_r, const Mat& K2_r);

struct SynthesisResult {
  ControllerRealization controller;
  Gains gains;
  BalancedTruncation reduction;
};

/// Steps I-III: gains from the two shifted CAREs, balanced truncation of
/// (A + L C, [B, L], K2) and assembly of the observer-based controller.
SynthesisResult synthesize_controller(const DenseSystem& sys, const InternalModel& im,
                                      const std::vector<double>& frequencies,
                                      const SynthesisParams& params);

/// Matrix Market blocks plus manifest.txt in `dir`.
void save_controller(const std::filesystem::path& dir, const ControllerRealization& c);
/// Throws std::runtime_error("controller artifact missing ...") when the
/// manifest is absent.
ControllerRealization load_controller(const std::filesystem::path& dir);

}  // namespace roomreg
