#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "dualnmf/errors.hpp"

namespace dualnmf {

// Dense row-major matrix of non-negative reals. The alias does not enforce
// non-negativity by itself; every operation that consumes one validates (or
// floors) its entries at the call boundary.
using NonNegMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

// Floor applied to data and reconstruction entries before logs and negative
// powers, and to factor entries after each update.
inline constexpr double kDefaultEpsFloor = 1e-12;

// Half-width of the band around alpha = 1 and alpha = 2 inside which the
// general-branch exponents are too ill-conditioned to evaluate directly and
// the closed limit forms are used instead.
inline constexpr double kDefaultLimitTol = 1e-8;

// Family indices outside this range are rejected by FactorConfig/CLI
// validation; the scalar divergence itself accepts any finite alpha but may
// overflow (NonFiniteResult) far outside it.
inline constexpr double kAlphaSupportBound = 10.0;

// Which branch of the divergence family an alpha value selects.
//   Poisson      alpha == 1 exactly
//   Gamma        alpha == 2 exactly
//   NearPoisson  0 < |alpha - 1| < limit_tol
//   NearGamma    0 < |alpha - 2| < limit_tol
//   General      everything else
enum class Regime { General, Poisson, Gamma, NearPoisson, NearGamma };

// The divergence-family index together with its classified regime.
struct AlphaParam {
    explicit AlphaParam(double alpha, double limit_tol = kDefaultLimitTol)
        : alpha(alpha),
          limit_tol(limit_tol),
          regime(classify(alpha, limit_tol)) {}

    double alpha;
    double limit_tol;
    Regime regime;

    // Legacy index of the non-dual family, beta = 2 - alpha.
    double beta() const { return 2.0 - alpha; }

    bool poisson_like() const {
        return regime == Regime::Poisson || regime == Regime::NearPoisson;
    }
    bool gamma_like() const {
        return regime == Regime::Gamma || regime == Regime::NearGamma;
    }

    static Regime classify(double alpha, double limit_tol) {
        if (!std::isfinite(alpha)) {
            throw InvalidConfig("alpha must be finite");
        }
        if (alpha == 1.0) return Regime::Poisson;
        if (alpha == 2.0) return Regime::Gamma;
        if (std::abs(alpha - 1.0) < limit_tol) return Regime::NearPoisson;
        if (std::abs(alpha - 2.0) < limit_tol) return Regime::NearGamma;
        return Regime::General;
    }
};

// A non-negative objective value tagged with the alpha it was computed under.
struct DivergenceValue {
    double value;
    double alpha;
};

}  // namespace dualnmf
