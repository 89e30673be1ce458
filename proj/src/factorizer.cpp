#include "dualnmf/factorizer.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dualnmf/updater.hpp"

namespace dualnmf {

namespace {

// Uniform double in [0, 1) from the top 53 bits of the generator output,
// identical across standard library implementations.
double canonical_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double r_squared_from(double numerator, double denominator, Index p, Index n,
                      double grand_mean) {
    const double degenerate = 1e-12 * static_cast<double>(p) *
                              static_cast<double>(n) * (1.0 + grand_mean);
    if (denominator < degenerate) {
        if (numerator < degenerate) return 1.0;  // constant V fitted exactly
        throw ConstantMatrix(
            "R^2 undefined: grand-mean divergence is degenerate (" +
            std::to_string(denominator) + ") for a (near-)constant matrix");
    }
    if (numerator < 1e-12 * denominator) return 1.0;
    return 1.0 - numerator / denominator;
}

FactorResult run_single_impl(const NonNegMatrix& V, const FactorConfig& cfg,
                             std::uint64_t seed, double denom,
                             const NonNegMatrix* W0, const NonNegMatrix* H0) {
    const AlphaParam a(cfg.alpha);
    const NonNegMatrix Vf = V.cwiseMax(cfg.eps_floor);
    const double grand_mean = Vf.mean();

    FactorResult res;
    res.seed_used = seed;
    res.restart_index = 0;
    res.converged = false;

    NonNegMatrix W;
    NonNegMatrix H;
    if (W0 != nullptr && H0 != nullptr) {
        W = *W0;
        H = *H0;
    } else {
        std::tie(W, H) = init_factors(V.rows(), V.cols(), cfg.rank, seed,
                                      grand_mean, cfg.eps_floor);
    }
    double prev = matrix_objective(a, W, H, Vf, cfg.eps_floor).value;
    res.trace.push_back({0, prev});

    std::size_t iters = 0;
    for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
        std::tie(W, H) = update_pair(a, W, H, Vf, cfg.eps_floor);
        const double cur = matrix_objective(a, W, H, Vf, cfg.eps_floor).value;
        res.trace.push_back({t, cur});
        iters = t;

        double change = std::abs(cur - prev);
        if (cfg.convergence == ConvergenceMode::Relative) {
            change /= 1.0 + cur;
        }
        prev = cur;
        if (change < cfg.delta) {
            res.converged = true;
            break;
        }
    }

    res.W = std::move(W);
    res.H = std::move(H);
    res.iterations_used = iters;
    res.final_objective = {prev, cfg.alpha};
    res.r_squared =
        r_squared_from(prev, denom, V.rows(), V.cols(), grand_mean);
    return res;
}

}  // namespace

void FactorConfig::validate() const {
    if (rank < 1) throw InvalidConfig("rank must be >= 1");
    if (restarts < 1) throw InvalidConfig("restarts must be >= 1");
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw InvalidConfig("delta must lie in (0, 1)");
    }
    if (!(eps_floor > 0.0)) throw InvalidConfig("eps_floor must be positive");
    if (!std::isfinite(alpha) || std::abs(alpha) > kAlphaSupportBound) {
        throw InvalidConfig("alpha must lie in [-10, 10]");
    }
}

bool FactorConfig::rank_warning(Index p, Index n) const {
    const double limit = static_cast<double>(n) * static_cast<double>(p) /
                         static_cast<double>(n + p);
    return static_cast<double>(rank) >= limit;
}

std::pair<NonNegMatrix, NonNegMatrix> init_factors(Index p, Index n,
                                                   std::size_t rank,
                                                   std::uint64_t seed,
                                                   double scale_hint,
                                                   double eps_floor) {
    if (p < 1 || n < 1 || rank < 1) {
        throw InvalidConfig("factor dimensions must be positive");
    }
    if (!(scale_hint > 0.0)) {
        throw NonPositiveArgument("scale_hint must be positive");
    }
    const Index k = static_cast<Index>(rank);
    const double hi = 2.0 * std::sqrt(scale_hint / static_cast<double>(rank));
    const double span = std::max(hi - eps_floor, 0.0);

    std::mt19937_64 rng(seed);
    NonNegMatrix W(p, k);
    NonNegMatrix H(k, n);
    for (Index i = 0; i < W.size(); ++i) {
        W.data()[i] = eps_floor + canonical_uniform(rng) * span;
    }
    for (Index i = 0; i < H.size(); ++i) {
        H.data()[i] = eps_floor + canonical_uniform(rng) * span;
    }
    return {std::move(W), std::move(H)};
}

FactorResult run_single(const NonNegMatrix& V, const FactorConfig& cfg,
                        std::uint64_t seed) {
    cfg.validate();
    const AlphaParam a(cfg.alpha);
    const double denom = grand_mean_objective(a, V, cfg.eps_floor);
    return run_single_impl(V, cfg, seed, denom);
}

MultiResult run_multi(const NonNegMatrix& V, const FactorConfig& cfg) {
    cfg.validate();
    const AlphaParam a(cfg.alpha);
    const double denom = grand_mean_objective(a, V, cfg.eps_floor);

    MultiResult out;
    bool have_best = false;
    double best_objective = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < cfg.restarts; ++i) {
        const std::uint64_t seed = cfg.seed + i;
        RestartSummary summary{i, seed, 0, 0.0, false, false, {}};
        try {
            FactorResult r = run_single_impl(V, cfg, seed, denom);
            summary.iterations = r.iterations_used;
            summary.final_objective = r.final_objective.value;
            summary.converged = r.converged;
            if (!have_best || r.final_objective.value < best_objective) {
                best_objective = r.final_objective.value;
                r.restart_index = i;
                out.best = std::move(r);
                have_best = true;
            }
        } catch (const Error& e) {
            summary.failed = true;
            summary.error = e.what();
        }
        out.restarts.push_back(std::move(summary));
    }

    if (!have_best) {
        throw AllRestartsFailed("all " + std::to_string(cfg.restarts) +
                                " restarts failed");
    }
    return out;
}

double grand_mean_objective(const AlphaParam& a, const NonNegMatrix& V,
                            double eps_floor) {
    const NonNegMatrix Vf = V.cwiseMax(eps_floor);
    const NonNegMatrix mean_model =
        NonNegMatrix::Constant(V.rows(), V.cols(), Vf.mean());
    return reconstruction_objective(a, mean_model, Vf, eps_floor).value;
}

double r_squared(const AlphaParam& a, const NonNegMatrix& W,
                 const NonNegMatrix& H, const NonNegMatrix& V,
                 double eps_floor) {
    const NonNegMatrix Vf = V.cwiseMax(eps_floor);
    const double num = matrix_objective(a, W, H, Vf, eps_floor).value;
    const double den = grand_mean_objective(a, V, eps_floor);
    return r_squared_from(num, den, V.rows(), V.cols(), Vf.mean());
}

}  // namespace dualnmf
