#include "dualnmf/divergence.hpp"

#include <cmath>
#include <string>

namespace dualnmf {

namespace {

void require_positive(double mu2, double mu1) {
    if (!(mu1 > 0.0) || !(mu2 > 0.0)) {
        throw NonPositiveArgument("means must be strictly positive, got mu2=" +
                                  std::to_string(mu2) +
                                  " mu1=" + std::to_string(mu1));
    }
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw NonFiniteResult(std::string(what) + " overflowed");
    }
    return v;
}

double poisson_form(double mu2, double mu1) {
    return mu2 * std::log(mu2 / mu1) - mu2 + mu1;
}

double gamma_form(double mu2, double mu1) {
    return std::log(mu1 / mu2) + mu2 / mu1 - 1.0;
}

}  // namespace

double dual_divergence_scalar(const AlphaParam& a, double mu2, double mu1) {
    require_positive(mu2, mu1);
    if (mu2 == mu1) return 0.0;  // unique minimum, exact in every regime
    double v;
    if (a.poisson_like()) {
        v = poisson_form(mu2, mu1);
    } else if (a.gamma_like()) {
        v = gamma_form(mu2, mu1);
    } else {
        const double b1 = 1.0 - a.alpha;
        const double b2 = 2.0 - a.alpha;
        v = (std::pow(mu2, b2) - b2 * mu2 * std::pow(mu1, b1) +
             b1 * std::pow(mu1, b2)) /
            (b1 * b2);
    }
    return checked(v, "dual_divergence_scalar");
}

double dual_divergence_grad(const AlphaParam& a, double mu2, double mu1) {
    require_positive(mu2, mu1);
    double v;
    if (a.poisson_like()) {
        v = std::log(mu2 / mu1);
    } else {
        const double b1 = 1.0 - a.alpha;
        v = (std::pow(mu2, b1) - std::pow(mu1, b1)) / b1;
    }
    return checked(v, "dual_divergence_grad");
}

double dual_divergence_hess(const AlphaParam& a, double mu2, double mu1) {
    require_positive(mu2, mu1);
    return checked(std::pow(mu2, -a.alpha), "dual_divergence_hess");
}

double convention_factor(const AlphaParam& a) {
    if (a.regime == Regime::General) {
        return std::abs((1.0 - a.alpha) * (2.0 - a.alpha));
    }
    return 1.0;
}

DivergenceValue reconstruction_objective(const AlphaParam& a,
                                         const NonNegMatrix& recon,
                                         const NonNegMatrix& V,
                                         double eps_floor) {
    if (recon.rows() != V.rows() || recon.cols() != V.cols()) {
        throw DimensionMismatch("reconstruction is " +
                                std::to_string(recon.rows()) + "x" +
                                std::to_string(recon.cols()) + ", data is " +
                                std::to_string(V.rows()) + "x" +
                                std::to_string(V.cols()));
    }
    const Index m = recon.size();
    const double* r = recon.data();
    const double* v = V.data();

    double sum = 0.0;
    if (a.poisson_like()) {
        for (Index t = 0; t < m; ++t) {
            const double ri = std::max(r[t], eps_floor);
            const double vi = std::max(v[t], eps_floor);
            sum += ri * std::log(ri / vi) - ri + vi;
        }
    } else if (a.gamma_like()) {
        for (Index t = 0; t < m; ++t) {
            const double ri = std::max(r[t], eps_floor);
            const double vi = std::max(v[t], eps_floor);
            sum += std::log(vi / ri) + ri / vi - 1.0;
        }
    } else {
        const double b1 = 1.0 - a.alpha;
        const double b2 = 2.0 - a.alpha;
        const double sign = (a.alpha > 1.0 && a.alpha < 2.0) ? -1.0 : 1.0;
        for (Index t = 0; t < m; ++t) {
            const double ri = std::max(r[t], eps_floor);
            const double vi = std::max(v[t], eps_floor);
            if (ri == vi) continue;  // term is exactly zero at the minimum
            sum += sign * (std::pow(ri, b2) - b2 * ri * std::pow(vi, b1) +
                           b1 * std::pow(vi, b2));
        }
    }
    return {checked(sum, "reconstruction_objective"), a.alpha};
}

DivergenceValue matrix_objective(const AlphaParam& a, const NonNegMatrix& W,
                                 const NonNegMatrix& H, const NonNegMatrix& V,
                                 double eps_floor) {
    if (W.cols() != H.rows() || W.rows() != V.rows() || H.cols() != V.cols()) {
        throw DimensionMismatch(
            "factors " + std::to_string(W.rows()) + "x" +
            std::to_string(W.cols()) + " * " + std::to_string(H.rows()) + "x" +
            std::to_string(H.cols()) + " do not conform with data " +
            std::to_string(V.rows()) + "x" + std::to_string(V.cols()));
    }
    return reconstruction_objective(a, W * H, V, eps_floor);
}

}  // namespace dualnmf
