#pragma once

#include "dualnmf/types.hpp"

namespace dualnmf {

// Generalized dual KL divergence between two positive scalars, with mu1 as
// the reference. Normalized form: for the general regime
//
//   D(mu2 || mu1) = (mu2^b2 - b2 * mu2 * mu1^b1 + b1 * mu1^b2) / (b1 * b2),
//   b1 = 1 - alpha, b2 = 2 - alpha,
//
// which is convex in mu2 for every alpha, has its unique minimum at
// mu2 == mu1, and is continuous in alpha. The removable singularities at
// alpha = 1 and alpha = 2 are taken in closed form:
//
//   alpha = 1 (Poisson):  mu2*log(mu2/mu1) - mu2 + mu1
//   alpha = 2 (gamma):    log(mu1/mu2) + mu2/mu1 - 1
//
// Special values: alpha = 0 gives (mu2-mu1)^2/2 (Gaussian), alpha = 3 gives
// (mu1-mu2)^2/(2*mu1^2*mu2) (inverse Gaussian).
//
// Throws NonPositiveArgument if either mean is <= 0, NonFiniteResult on
// overflow (extreme alpha with large ratios).
double dual_divergence_scalar(const AlphaParam& a, double mu2, double mu1);

// d/dmu2 of dual_divergence_scalar: (mu2^(1-alpha) - mu1^(1-alpha))/(1-alpha),
// with the alpha -> 1 limit log(mu2/mu1). Zero iff mu2 == mu1.
double dual_divergence_grad(const AlphaParam& a, double mu2, double mu1);

// d^2/dmu2^2 of dual_divergence_scalar: mu2^(-alpha), strictly positive for
// every alpha (the family is convex in the model argument).
double dual_divergence_hess(const AlphaParam& a, double mu2, double mu1);

// Constant relating the matrix objective to the normalized scalar family in
// the general regime:
//
//   matrix_objective == convention_factor(a) * sum_ij scalar(a, WH_ij, V_ij)
//
// equal to |(1-alpha)(2-alpha)| in the general regime and 1 in the Poisson,
// gamma and near-limit regimes (where the closed forms coincide). The matrix
// objective drops the 1/((1-alpha)(2-alpha)) prefactor, flipping the sign for
// 1 < alpha < 2 so it stays non-negative; the scalar family keeps the
// prefactor so that its derivatives and alpha-limits are continuous.
double convention_factor(const AlphaParam& a);

// Elementwise divergence of a reconstruction R from data V, summed over all
// entries, in the prefactor-free convention:
//
//   general:  s * sum_ij [ R^b2 - b2*R*V^b1 + b1*V^b2 ],  s = -1 on (1,2)
//   alpha=1:  sum_ij [ R*log(R/V) - R + V ]
//   alpha=2:  sum_ij [ log(V/R) + R/V - 1 ]
//
// Near-limit regimes evaluate the matching closed form. Entries of both R
// and V below eps_floor are lifted to eps_floor first.
DivergenceValue reconstruction_objective(const AlphaParam& a,
                                         const NonNegMatrix& recon,
                                         const NonNegMatrix& V,
                                         double eps_floor);

// reconstruction_objective evaluated at R = W*H. At alpha = 0 this is exactly
// sum_ij (V_ij - (WH)_ij)^2.
DivergenceValue matrix_objective(const AlphaParam& a, const NonNegMatrix& W,
                                 const NonNegMatrix& H, const NonNegMatrix& V,
                                 double eps_floor);

}  // namespace dualnmf
