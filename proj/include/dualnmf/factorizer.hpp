#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dualnmf/divergence.hpp"
#include "dualnmf/types.hpp"

namespace dualnmf {

enum class ConvergenceMode {
    Absolute,  // stop when |D_t - D_{t-1}| < delta
    Relative   // stop when |D_t - D_{t-1}| / (1 + D_t) < delta
};

struct FactorConfig {
    std::size_t rank = 2;
    double alpha = 0.0;
    double delta = 1e-6;  // convergence threshold, must lie in (0, 1)
    std::size_t max_iters = 200;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
    double eps_floor = kDefaultEpsFloor;
    ConvergenceMode convergence = ConvergenceMode::Absolute;

    // Throws InvalidConfig unless rank >= 1, restarts >= 1, 0 < delta < 1,
    // eps_floor > 0 and |alpha| <= kAlphaSupportBound.
    void validate() const;

    // True when rank >= n*p/(n+p), the point past which the factorization
    // stores more numbers than the data.
    bool rank_warning(Index p, Index n) const;
};

struct TracePoint {
    std::size_t iteration;
    double objective;
};

struct FactorResult {
    NonNegMatrix W;
    NonNegMatrix H;
    std::vector<TracePoint> trace;  // entry 0 is the initial objective
    DivergenceValue final_objective;
    double r_squared;
    bool converged;
    std::size_t iterations_used;
    std::size_t restart_index;
    std::uint64_t seed_used;
};

struct RestartSummary {
    std::size_t index;
    std::uint64_t seed;
    std::size_t iterations;
    double final_objective;
    bool converged;
    bool failed;
    std::string error;  // empty unless failed
};

struct MultiResult {
    FactorResult best;
    std::vector<RestartSummary> restarts;
};

// Random positive starting factors, entries i.i.d. uniform on
// (eps_floor, 2*sqrt(scale_hint/rank)) so that the expected entry of W*H
// matches scale_hint (callers pass the grand mean of V). Deterministic in
// seed; W is filled first, both row-major.
std::pair<NonNegMatrix, NonNegMatrix> init_factors(Index p, Index n,
                                                   std::size_t rank,
                                                   std::uint64_t seed,
                                                   double scale_hint,
                                                   double eps_floor);

// One factorization run from a random start: alternate update pairs, record
// the objective after each pair, stop at the first iteration whose objective
// change is below cfg.delta (per cfg.convergence) or at cfg.max_iters with
// converged=false. max_iters = 0 returns the initial factors and a one-point
// trace.
FactorResult run_single(const NonNegMatrix& V, const FactorConfig& cfg,
                        std::uint64_t seed);

// Same loop from caller-supplied starting factors (seed recorded for
// provenance only).
FactorResult run_single(const NonNegMatrix& V, const FactorConfig& cfg,
                        std::uint64_t seed, const NonNegMatrix& W0,
                        const NonNegMatrix& H0);

// cfg.restarts independent runs seeded cfg.seed + i; returns the one with
// the smallest final objective (ties to the lowest index) along with a
// summary of every restart. Individual restart failures are recorded and
// skipped; throws AllRestartsFailed only if none succeeds.
MultiResult run_multi(const NonNegMatrix& V, const FactorConfig& cfg);

// Divergence of the grand-mean model: every reconstructed entry replaced by
// mean(V). This is the R-squared denominator; pure in (V, alpha), so callers
// that loop may compute it once.
double grand_mean_objective(const AlphaParam& a, const NonNegMatrix& V,
                            double eps_floor);

// Proportion of explained variation:
//
//   R^2 = 1 - D(WH || V) / D(mean(V) || V)
//
// Returns exactly 1 when the numerator is below 1e-12 * denominator; may be
// negative (fit worse than the grand-mean model). Throws ConstantMatrix when
// the denominator is degenerate ((near-)constant V) but the numerator is not.
double r_squared(const AlphaParam& a, const NonNegMatrix& W,
                 const NonNegMatrix& H, const NonNegMatrix& V,
                 double eps_floor);

}  // namespace dualnmf
