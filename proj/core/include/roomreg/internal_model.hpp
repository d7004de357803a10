#pragma once

#include <vector>

#include "roomreg/types.hpp"

namespace roomreg {

/// Frequencies of the exogenous signals and the polynomial order n_k of the
/// coefficients at each frequency (n_k - 1 is the highest degree).
struct SignalSpec {
  std::vector<double> frequencies;  // strictly increasing, >= 0
  std::vector<int> orders;          // one per frequency, >= 1
  int p = 1;                        // output dimension

  void validate() const;
  bool operator==(const SignalSpec&) const = default;
};

struct InternalModel {
  Mat G1, G2;
  int dim() const { return static_cast<int>(G1.rows()); }
};

/// G1 = diag(J_0, J_1, ...): J_0 is the p*n_0 nilpotent block with identity
/// superdiagonal blocks (only when 0 is among the frequencies), J_k is
/// block-Jordan in Omega_k = [[0, w_k I], [-w_k I, 0]]. G2 injects into the
/// last block of each J (for J_k: [I_p; 0_p]).
InternalModel build_internal_model(const SignalSpec& spec);

}  // namespace roomreg
