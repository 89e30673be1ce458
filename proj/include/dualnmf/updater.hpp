#pragma once

#include <utility>

#include "dualnmf/types.hpp"

namespace dualnmf {

// One multiplicative update of H with W held fixed. General regime:
//
//   H'_aj = H_aj * [ sum_i (WH)_ij^(1-alpha) W_ia
//                  / sum_i W_ia V_ij^(1-alpha) ] ^ (1/(alpha-1))
//
// Poisson / near-Poisson regime (the alpha -> 1 limit):
//
//   H'_aj = H_aj * exp( sum_i W_ia log(V_ij / (WH)_ij) / sum_i W_ia )
//
// The objective is non-increasing under either form, and a factor pair with
// WH == V is a fixed point. Data and reconstruction entries are lifted to
// eps_floor before powers and logs; output entries are floored at eps_floor.
// For alpha < 0 or alpha > 3 the bracket is accumulated in the log domain to
// delay overflow.
//
// Throws DimensionMismatch, DegenerateFactor (a column of W sums to
// <= eps_floor), NonFiniteResult.
NonNegMatrix update_h(const AlphaParam& a, const NonNegMatrix& W,
                      const NonNegMatrix& H, const NonNegMatrix& V,
                      double eps_floor);

// Mirror image of update_h with the roles of W and H exchanged; degenerate
// when a row of H sums to <= eps_floor. Coincides with
// update_h(a, H^T, W^T, V^T)^T.
NonNegMatrix update_w(const AlphaParam& a, const NonNegMatrix& W,
                      const NonNegMatrix& H, const NonNegMatrix& V,
                      double eps_floor);

// One full iteration: H-update with the current W, then W-update with the
// new H. Returns (W', H').
std::pair<NonNegMatrix, NonNegMatrix> update_pair(const AlphaParam& a,
                                                  const NonNegMatrix& W,
                                                  const NonNegMatrix& H,
                                                  const NonNegMatrix& V,
                                                  double eps_floor);

// Post-hoc rescaling for reporting: scales each column of W to unit sum and
// compensates the matching row of H, leaving W*H unchanged. The updates
// themselves never normalize.
void normalize_columns(NonNegMatrix& W, NonNegMatrix& H);

}  // namespace dualnmf
