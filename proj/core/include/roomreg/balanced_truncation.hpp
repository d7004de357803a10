#pragma once

#include "roomreg/types.hpp"

namespace roomreg {

struct BalancedTruncation {
  Mat A, B, C;         // reduced realization
  Vec hankel;          // all Hankel singular values, descending
  int order = 0;       // retained order (requested order plus any tied values)
  double error_bound = 0.0;  // 2 * sum of discarded Hankel singular values
  Mat P, Q;            // controllability and observability Gramians (standard form)
};

/// Square-root balanced truncation of the stable system (E, A, B, C); E may
/// be empty (identity) or symmetric positive definite. Equal Hankel singular
/// values (relative 1e-10) are never split across the cut, so the retained
/// order can exceed r.
BalancedTruncation balanced_truncate(const Mat& A, const Mat& E, const Mat& B, const Mat& C,
                                     int r);

}  // namespace roomreg
