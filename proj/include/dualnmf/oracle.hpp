#pragma once

#include <cstddef>

#include "dualnmf/types.hpp"

namespace dualnmf {

// Reference implementations used to validate the fast paths. naive_objective
// and scalar_descent_oracle share no arithmetic helpers with the divergence
// or updater modules: they transliterate the piecewise objective entry by
// entry, with no flooring, rearrangement or log-domain tricks, and are
// allowed to be orders of magnitude slower.

// Direct entrywise evaluation of the piecewise objective at R = W*H.
// Requires strictly positive V (the oracle does not floor).
double naive_objective(double alpha, const NonNegMatrix& W,
                       const NonNegMatrix& H, const NonNegMatrix& V);

// Centered finite differences of dual_divergence_scalar in its model
// argument. Requires step > 0 and mu2 - step > 0.
double finite_diff_grad(const AlphaParam& a, double mu2, double mu1,
                        double step);
double finite_diff_hess(const AlphaParam& a, double mu2, double mu1,
                        double step);

// One entry of W or H, named for the coordinate-descent oracle.
struct EntryRef {
    enum class Factor { W, H };
    Factor factor;
    Index row;
    Index col;
};

// Brute-force 1-D minimizer of the objective in a single factor entry with
// everything else fixed: scans multiplicative factors of the current entry
// on a log-spaced grid over [1e-2, 1e2] and returns the minimizing entry
// value (first minimum on ties). Requires grid_size >= 1000.
double scalar_descent_oracle(double alpha, const NonNegMatrix& W,
                             const NonNegMatrix& H, const NonNegMatrix& V,
                             const EntryRef& coordinate,
                             std::size_t grid_size);

}  // namespace dualnmf
