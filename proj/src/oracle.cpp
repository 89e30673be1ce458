#include "dualnmf/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dualnmf/divergence.hpp"

namespace dualnmf {

namespace {

// One term of the piecewise objective, written exactly as the piecewise
// definition reads. Kept separate from the divergence module on purpose.
double naive_term(double alpha, double r, double v) {
    if (alpha == 1.0) {
        return r * std::log(r / v) - r + v;
    }
    if (alpha == 2.0) {
        return std::log(v / r) + r / v - 1.0;
    }
    const double term = std::pow(r, 2.0 - alpha) -
                        (2.0 - alpha) * r * std::pow(v, 1.0 - alpha) +
                        (1.0 - alpha) * std::pow(v, 2.0 - alpha);
    return (alpha > 1.0 && alpha < 2.0) ? -term : term;
}

double naive_reconstruction_objective(double alpha, const NonNegMatrix& recon,
                                      const NonNegMatrix& V) {
    double total = 0.0;
    for (Index i = 0; i < V.rows(); ++i) {
        for (Index j = 0; j < V.cols(); ++j) {
            if (!(V(i, j) > 0.0)) {
                throw NonPositiveArgument(
                    "naive objective requires strictly positive data");
            }
            total += naive_term(alpha, recon(i, j), V(i, j));
        }
    }
    if (!std::isfinite(total)) {
        throw NonFiniteResult("naive objective overflowed");
    }
    return total;
}

}  // namespace

double naive_objective(double alpha, const NonNegMatrix& W,
                       const NonNegMatrix& H, const NonNegMatrix& V) {
    if (W.cols() != H.rows() || W.rows() != V.rows() || H.cols() != V.cols()) {
        throw DimensionMismatch("factor shapes do not conform with data");
    }
    return naive_reconstruction_objective(alpha, W * H, V);
}

double finite_diff_grad(const AlphaParam& a, double mu2, double mu1,
                        double step) {
    if (!(step > 0.0) || !(mu2 - step > 0.0)) {
        throw NonPositiveArgument("need step > 0 and mu2 - step > 0");
    }
    return (dual_divergence_scalar(a, mu2 + step, mu1) -
            dual_divergence_scalar(a, mu2 - step, mu1)) /
           (2.0 * step);
}

double finite_diff_hess(const AlphaParam& a, double mu2, double mu1,
                        double step) {
    if (!(step > 0.0) || !(mu2 - step > 0.0)) {
        throw NonPositiveArgument("need step > 0 and mu2 - step > 0");
    }
    return (dual_divergence_scalar(a, mu2 + step, mu1) -
            2.0 * dual_divergence_scalar(a, mu2, mu1) +
            dual_divergence_scalar(a, mu2 - step, mu1)) /
           (step * step);
}

double scalar_descent_oracle(double alpha, const NonNegMatrix& W,
                             const NonNegMatrix& H, const NonNegMatrix& V,
                             const EntryRef& coordinate,
                             std::size_t grid_size) {
    if (grid_size < 1000) {
        throw InvalidConfig("grid_size must be >= 1000");
    }
    const bool in_w = coordinate.factor == EntryRef::Factor::W;
    const NonNegMatrix& target = in_w ? W : H;
    if (coordinate.row < 0 || coordinate.row >= target.rows() ||
        coordinate.col < 0 || coordinate.col >= target.cols()) {
        throw DimensionMismatch("coordinate out of range");
    }

    NonNegMatrix Wc = W;
    NonNegMatrix Hc = H;
    double& entry = in_w ? Wc(coordinate.row, coordinate.col)
                         : Hc(coordinate.row, coordinate.col);
    const double base = entry;

    // Multiplicative updates move entries by ratios, so the grid is
    // log-spaced in the multiplier.
    const double lo = std::log(1e-2);
    const double hi = std::log(1e2);
    double best_value = base;
    double best_objective = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < grid_size; ++t) {
        const double frac =
            static_cast<double>(t) / static_cast<double>(grid_size - 1);
        const double candidate = base * std::exp(lo + frac * (hi - lo));
        entry = candidate;
        const double obj = naive_reconstruction_objective(alpha, Wc * Hc, V);
        if (obj < best_objective) {
            best_objective = obj;
            best_value = candidate;
        }
    }
    return best_value;
}

}  // namespace dualnmf
