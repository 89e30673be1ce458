#include "dualnmf/updater.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dualnmf {

namespace {

void require_conformable(const NonNegMatrix& W, const NonNegMatrix& H,
                         const NonNegMatrix& V) {
    if (W.cols() != H.rows() || W.rows() != V.rows() || H.cols() != V.cols()) {
        throw DimensionMismatch(
            "factors " + std::to_string(W.rows()) + "x" +
            std::to_string(W.cols()) + " * " + std::to_string(H.rows()) + "x" +
            std::to_string(H.cols()) + " do not conform with data " +
            std::to_string(V.rows()) + "x" + std::to_string(V.cols()));
    }
}

NonNegMatrix floored(const NonNegMatrix& M, double eps_floor) {
    return M.cwiseMax(eps_floor);
}

void check_finite(const NonNegMatrix& M, const char* what) {
    if (!M.allFinite()) {
        throw NonFiniteResult(std::string(what) + " produced NaN/Inf");
    }
}

// Whether the general-branch bracket is accumulated in the log domain. The
// powers x^(1-alpha) span an extreme range once the exponent magnitude
// exceeds ~2, so sums are formed as log-sum-exp there.
bool use_log_domain(double alpha) { return alpha < 0.0 || alpha > 3.0; }

// log( sum_i coef_i * base_i^expo ) over one column of `coef`, with zero
// coefficients skipped. Sequential in i, so the reduction order is fixed.
double log_weighted_power_sum(const NonNegMatrix& coef, Index col,
                              const NonNegMatrix& base, Index base_col,
                              double expo) {
    const Index n = coef.rows();
    double max_term = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        const double c = coef(i, col);
        if (c <= 0.0) continue;
        const double t = std::log(c) + expo * std::log(base(i, base_col));
        if (t > max_term) max_term = t;
    }
    if (!std::isfinite(max_term)) {
        throw DegenerateFactor("all coefficients vanished in a bracket sum");
    }
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double c = coef(i, col);
        if (c <= 0.0) continue;
        const double t = std::log(c) + expo * std::log(base(i, base_col));
        acc += std::exp(t - max_term);
    }
    return max_term + std::log(acc);
}

}  // namespace

NonNegMatrix update_h(const AlphaParam& a, const NonNegMatrix& W,
                      const NonNegMatrix& H, const NonNegMatrix& V,
                      double eps_floor) {
    require_conformable(W, H, V);
    const Eigen::VectorXd wsum = W.colwise().sum();
    for (Index c = 0; c < wsum.size(); ++c) {
        if (wsum(c) <= eps_floor) {
            throw DegenerateFactor("column " + std::to_string(c) +
                                   " of W sums to " + std::to_string(wsum(c)));
        }
    }

    const NonNegMatrix recon = floored(W * H, eps_floor);
    const NonNegMatrix Vf = floored(V, eps_floor);
    NonNegMatrix out(H.rows(), H.cols());

    if (a.poisson_like()) {
        const NonNegMatrix logratio =
            (Vf.array() / recon.array()).log().matrix();
        NonNegMatrix expo = W.transpose() * logratio;  // k x n
        expo.array().colwise() /= wsum.array();
        out = H.array() * expo.array().exp();
    } else if (use_log_domain(a.alpha)) {
        const double b1 = 1.0 - a.alpha;
        const double inv = 1.0 / (a.alpha - 1.0);
        for (Index ac = 0; ac < H.rows(); ++ac) {
            for (Index j = 0; j < H.cols(); ++j) {
                const double ln = log_weighted_power_sum(W, ac, recon, j, b1);
                const double ld = log_weighted_power_sum(W, ac, Vf, j, b1);
                out(ac, j) = H(ac, j) * std::exp((ln - ld) * inv);
            }
        }
    } else {
        const double b1 = 1.0 - a.alpha;
        const double inv = 1.0 / (a.alpha - 1.0);
        const NonNegMatrix num = W.transpose() * recon.array().pow(b1).matrix();
        const NonNegMatrix den = W.transpose() * Vf.array().pow(b1).matrix();
        out = H.array() * (num.array() / den.array()).pow(inv);
    }

    check_finite(out, "update_h");
    return floored(out, eps_floor);
}

NonNegMatrix update_w(const AlphaParam& a, const NonNegMatrix& W,
                      const NonNegMatrix& H, const NonNegMatrix& V,
                      double eps_floor) {
    require_conformable(W, H, V);
    const Eigen::VectorXd hsum = H.rowwise().sum();
    for (Index r = 0; r < hsum.size(); ++r) {
        if (hsum(r) <= eps_floor) {
            throw DegenerateFactor("row " + std::to_string(r) +
                                   " of H sums to " + std::to_string(hsum(r)));
        }
    }

    const NonNegMatrix recon = floored(W * H, eps_floor);
    const NonNegMatrix Vf = floored(V, eps_floor);
    const NonNegMatrix reconT = recon.transpose();
    const NonNegMatrix VfT = Vf.transpose();
    const NonNegMatrix HT = H.transpose();
    NonNegMatrix out(W.rows(), W.cols());

    if (a.poisson_like()) {
        const NonNegMatrix logratio =
            (Vf.array() / recon.array()).log().matrix();
        NonNegMatrix expo = logratio * H.transpose();  // p x k
        expo.array().rowwise() /= hsum.transpose().array();
        out = W.array() * expo.array().exp();
    } else if (use_log_domain(a.alpha)) {
        const double b1 = 1.0 - a.alpha;
        const double inv = 1.0 / (a.alpha - 1.0);
        for (Index i = 0; i < W.rows(); ++i) {
            for (Index ac = 0; ac < W.cols(); ++ac) {
                const double ln = log_weighted_power_sum(HT, ac, reconT, i, b1);
                const double ld = log_weighted_power_sum(HT, ac, VfT, i, b1);
                out(i, ac) = W(i, ac) * std::exp((ln - ld) * inv);
            }
        }
    } else {
        const double b1 = 1.0 - a.alpha;
        const double inv = 1.0 / (a.alpha - 1.0);
        const NonNegMatrix num =
            recon.array().pow(b1).matrix() * H.transpose();
        const NonNegMatrix den = Vf.array().pow(b1).matrix() * H.transpose();
        out = W.array() * (num.array() / den.array()).pow(inv);
    }

    check_finite(out, "update_w");
    return floored(out, eps_floor);
}

std::pair<NonNegMatrix, NonNegMatrix> update_pair(const AlphaParam& a,
                                                  const NonNegMatrix& W,
                                                  const NonNegMatrix& H,
                                                  const NonNegMatrix& V,
                                                  double eps_floor) {
    NonNegMatrix h_next = update_h(a, W, H, V, eps_floor);
    NonNegMatrix w_next = update_w(a, W, h_next, V, eps_floor);
    return {std::move(w_next), std::move(h_next)};
}

void normalize_columns(NonNegMatrix& W, NonNegMatrix& H) {
    if (W.cols() != H.rows()) {
        throw DimensionMismatch("factor shapes do not conform");
    }
    for (Index c = 0; c < W.cols(); ++c) {
        const double s = W.col(c).sum();
        if (s <= 0.0) continue;
        W.col(c) /= s;
        H.row(c) *= s;
    }
}

}  // namespace dualnmf
