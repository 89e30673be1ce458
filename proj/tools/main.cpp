// Command-line front end: factorize, alpha sweep, divergence curves,
// synthetic data generation, and output verification.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualnmf/divergence.hpp"
#include "dualnmf/factorizer.hpp"
#include "dualnmf/io.hpp"
#include "dualnmf/version.hpp"

namespace fs = std::filesystem;
using namespace dualnmf;

namespace {

// Stable exit codes, one per error class (documented in the README).
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInvalidConfig = 2,
    kParseError = 3,
    kNegativeEntry = 4,
    kRaggedRows = 5,
    kDimensionMismatch = 6,
    kNonPositiveArgument = 7,
    kDegenerateFactor = 8,
    kNonFiniteResult = 9,
    kAllRestartsFailed = 10,
    kConstantMatrix = 11,
    kWriteFailure = 12,
    kVerifyMismatch = 13,
};

int exit_code_for(const Error& e) {
    if (dynamic_cast<const InvalidConfig*>(&e)) return kInvalidConfig;
    if (dynamic_cast<const NegativeEntry*>(&e)) return kNegativeEntry;
    if (dynamic_cast<const RaggedRows*>(&e)) return kRaggedRows;
    if (dynamic_cast<const ParseError*>(&e)) return kParseError;
    if (dynamic_cast<const DimensionMismatch*>(&e)) return kDimensionMismatch;
    if (dynamic_cast<const NonPositiveArgument*>(&e)) {
        return kNonPositiveArgument;
    }
    if (dynamic_cast<const DegenerateFactor*>(&e)) return kDegenerateFactor;
    if (dynamic_cast<const NonFiniteResult*>(&e)) return kNonFiniteResult;
    if (dynamic_cast<const AllRestartsFailed*>(&e)) return kAllRestartsFailed;
    if (dynamic_cast<const ConstantMatrix*>(&e)) return kConstantMatrix;
    if (dynamic_cast<const WriteFailure*>(&e)) return kWriteFailure;
    return kFailure;
}

const char* error_name(const Error& e) {
    if (dynamic_cast<const InvalidConfig*>(&e)) return "InvalidConfig";
    if (dynamic_cast<const NegativeEntry*>(&e)) return "NegativeEntry";
    if (dynamic_cast<const RaggedRows*>(&e)) return "RaggedRows";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const NonPositiveArgument*>(&e)) {
        return "NonPositiveArgument";
    }
    if (dynamic_cast<const DegenerateFactor*>(&e)) return "DegenerateFactor";
    if (dynamic_cast<const NonFiniteResult*>(&e)) return "NonFiniteResult";
    if (dynamic_cast<const AllRestartsFailed*>(&e)) return "AllRestartsFailed";
    if (dynamic_cast<const ConstantMatrix*>(&e)) return "ConstantMatrix";
    if (dynamic_cast<const WriteFailure*>(&e)) return "WriteFailure";
    return "Error";
}

std::string now_utc_iso8601() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find(',', start);
        if (pos == std::string::npos) pos = text.size();
        const std::string tok = text.substr(start, pos - start);
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidConfig("bad alpha value '" + tok + "' in list");
        }
        start = pos + 1;
        if (pos == text.size()) break;
    }
    if (out.empty()) throw InvalidConfig("empty alpha list");
    return out;
}

struct FactorizeFlags {
    std::string input;
    std::size_t rank = 2;
    double alpha = 0.0;
    double delta = 1e-6;
    std::size_t max_iters = 200;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
    double eps_floor = kDefaultEpsFloor;
    std::string convergence = "abs";
    std::string out;

    FactorConfig to_config(double alpha_override) const {
        FactorConfig cfg;
        cfg.rank = rank;
        cfg.alpha = alpha_override;
        cfg.delta = delta;
        cfg.max_iters = max_iters;
        cfg.restarts = restarts;
        cfg.seed = seed;
        cfg.eps_floor = eps_floor;
        if (convergence == "rel") {
            cfg.convergence = ConvergenceMode::Relative;
        } else if (convergence == "abs") {
            cfg.convergence = ConvergenceMode::Absolute;
        } else {
            throw InvalidConfig("--convergence must be 'abs' or 'rel'");
        }
        cfg.validate();
        return cfg;
    }
};

void add_factorize_flags(CLI::App* cmd, FactorizeFlags& f, bool with_alpha) {
    cmd->add_option("--input", f.input, "input matrix (CSV or TSV)")
        ->required();
    cmd->add_option("--rank", f.rank, "factorization rank")->required();
    if (with_alpha) {
        cmd->add_option("--alpha", f.alpha, "divergence family index");
    }
    cmd->add_option("--delta", f.delta, "convergence threshold in (0,1)");
    cmd->add_option("--max-iters", f.max_iters, "iteration cap per restart");
    cmd->add_option("--restarts", f.restarts, "number of random restarts");
    cmd->add_option("--seed", f.seed, "base RNG seed");
    cmd->add_option("--eps-floor", f.eps_floor, "positivity floor");
    cmd->add_option("--convergence", f.convergence,
                    "convergence mode: abs or rel");
    cmd->add_option("--out", f.out, "output directory")->required();
}

RunManifest build_manifest(const FactorizeFlags& flags,
                           const FactorConfig& cfg, const NonNegMatrix& V,
                           const MultiResult& multi) {
    RunManifest m;
    m.artifact_version = kVersion;
    m.created_utc = now_utc_iso8601();
    m.input_path = flags.input;
    m.input_digest = digest_file(flags.input);
    m.rows = V.rows();
    m.cols = V.cols();
    m.config = cfg;
    m.rank_warning = cfg.rank_warning(V.rows(), V.cols());
    m.restarts = multi.restarts;
    m.winner_index = multi.best.restart_index;
    m.r_squared = multi.best.r_squared;
    m.final_objective = multi.best.final_objective.value;
    m.converged = multi.best.converged;
    m.iterations = multi.best.iterations_used;
    return m;
}

int cmd_factorize(const FactorizeFlags& flags) {
    const FactorConfig cfg = flags.to_config(flags.alpha);
    const NonNegMatrix V = read_matrix(flags.input);
    if (cfg.rank_warning(V.rows(), V.cols())) {
        std::fprintf(stderr,
                     "warning: rank %zu >= np/(n+p) for %lldx%lld input; the "
                     "factorization stores more numbers than the data\n",
                     cfg.rank, static_cast<long long>(V.rows()),
                     static_cast<long long>(V.cols()));
    }
    const MultiResult multi = run_multi(V, cfg);
    const RunManifest manifest = build_manifest(flags, cfg, V, multi);
    write_result(multi.best, manifest, flags.out);
    std::printf("restart=%zu seed=%llu iterations=%zu converged=%s "
                "objective=%s r2=%s\n",
                multi.best.restart_index,
                static_cast<unsigned long long>(multi.best.seed_used),
                multi.best.iterations_used,
                multi.best.converged ? "true" : "false",
                format_double(multi.best.final_objective.value).c_str(),
                format_double(multi.best.r_squared).c_str());
    return kOk;
}

int cmd_sweep(const FactorizeFlags& flags, const std::string& alphas) {
    const std::vector<double> alpha_list = parse_alpha_list(alphas);
    const NonNegMatrix V = read_matrix(flags.input);

    std::string csv = "alpha,final_objective,r_squared,iterations,converged\n";
    for (double alpha : alpha_list) {
        csv += format_double(alpha);
        try {
            const FactorConfig cfg = flags.to_config(alpha);
            const MultiResult multi = run_multi(V, cfg);
            csv += ',' + format_double(multi.best.final_objective.value);
            csv += ',' + format_double(multi.best.r_squared);
            csv += ',' + std::to_string(multi.best.iterations_used);
            csv += multi.best.converged ? ",true\n" : ",false\n";
        } catch (const Error& e) {
            // Recorded in the row; the sweep keeps going.
            csv += ",nan,nan,0,error:";
            csv += error_name(e);
            csv += '\n';
            std::fprintf(stderr, "sweep: alpha=%s failed: %s\n",
                         format_double(alpha).c_str(), e.what());
        }
    }

    std::error_code ec;
    fs::create_directories(flags.out, ec);
    if (ec) {
        throw WriteFailure("cannot create '" + flags.out + "': " +
                           ec.message());
    }
    const fs::path out = fs::path(flags.out) / "sweep.csv";
    write_text_file(out, csv);
    std::printf("sweep: %zu alphas -> %s\n", alpha_list.size(),
                out.string().c_str());
    return kOk;
}

int cmd_curve(const std::string& alphas, double mu_min, double mu_max,
              std::size_t points, const std::string& spacing,
              const std::string& out) {
    const std::vector<double> alpha_list = parse_alpha_list(alphas);
    if (!(mu_min > 0.0) || !(mu_min < mu_max)) {
        throw InvalidConfig("need 0 < mu-min < mu-max");
    }
    if (points < 2) throw InvalidConfig("need at least 2 grid points");
    const bool log_spaced = spacing == "log";
    if (!log_spaced && spacing != "linear") {
        throw InvalidConfig("--spacing must be 'log' or 'linear'");
    }

    std::vector<double> grid(points);
    for (std::size_t t = 0; t < points; ++t) {
        const double frac =
            static_cast<double>(t) / static_cast<double>(points - 1);
        grid[t] = log_spaced
                      ? std::exp(std::log(mu_min) +
                                 frac * (std::log(mu_max) - std::log(mu_min)))
                      : mu_min + frac * (mu_max - mu_min);
    }

    std::string csv = "mu,alpha,divergence\n";
    for (double alpha : alpha_list) {
        const AlphaParam a(alpha);
        for (double mu : grid) {
            csv += format_double(mu);
            csv += ',' + format_double(alpha);
            csv += ',' + format_double(dual_divergence_scalar(a, mu, 1.0));
            csv += '\n';
        }
    }
    write_text_file(out, csv);
    return kOk;
}

double sample_inverse_gaussian(std::mt19937_64& rng, double mean,
                               double lambda) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double y = normal(rng) * normal(rng);  // chi-squared(1) via square
    const double x =
        mean + mean * mean * y / (2.0 * lambda) -
        mean / (2.0 * lambda) *
            std::sqrt(4.0 * mean * lambda * y + mean * mean * y * y);
    return unif(rng) <= mean / (mean + x) ? x : mean * mean / x;
}

int cmd_synth(std::size_t p, std::size_t n, std::size_t rank,
              const std::string& noise, double noise_scale,
              std::uint64_t seed, const std::string& out) {
    if (p < 1 || n < 1 || rank < 1) {
        throw InvalidConfig("need p, n, rank >= 1");
    }
    if (noise != "none" && !(noise_scale > 0.0)) {
        throw InvalidConfig("noise-scale must be positive");
    }

    std::mt19937_64 rng(seed);
    auto uniform_entry = [&rng]() {
        // top 53 bits -> [0,1), then shifted into a positive range
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return 0.5 + 1.5 * u;
    };
    NonNegMatrix W(static_cast<Index>(p), static_cast<Index>(rank));
    NonNegMatrix H(static_cast<Index>(rank), static_cast<Index>(n));
    for (Index i = 0; i < W.size(); ++i) W.data()[i] = uniform_entry();
    for (Index i = 0; i < H.size(); ++i) H.data()[i] = uniform_entry();

    NonNegMatrix V = W * H;
    if (noise == "gaussian") {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index i = 0; i < V.size(); ++i) {
            const double m = V.data()[i];
            V.data()[i] = m + noise_scale * m * normal(rng);
        }
    } else if (noise == "poisson") {
        // Dispersion is tied to the mean; --noise-scale is ignored here.
        for (Index i = 0; i < V.size(); ++i) {
            std::poisson_distribution<long long> pois(V.data()[i]);
            V.data()[i] = static_cast<double>(pois(rng));
        }
    } else if (noise == "gamma") {
        const double shape = 1.0 / (noise_scale * noise_scale);
        for (Index i = 0; i < V.size(); ++i) {
            std::gamma_distribution<double> gamma(shape,
                                                  V.data()[i] / shape);
            V.data()[i] = gamma(rng);
        }
    } else if (noise == "invgauss") {
        for (Index i = 0; i < V.size(); ++i) {
            const double m = V.data()[i];
            V.data()[i] = sample_inverse_gaussian(
                rng, m, m / (noise_scale * noise_scale));
        }
    } else if (noise != "none") {
        throw InvalidConfig("unknown noise model '" + noise + "'");
    }
    V = V.cwiseMax(kDefaultEpsFloor);

    write_matrix_csv(out, V);

    nlohmann::json truth;
    truth["rank"] = rank;
    truth["noise"] = noise;
    truth["noise_scale"] = noise_scale;
    truth["seed"] = seed;
    auto matrix_json = [](const NonNegMatrix& M) {
        nlohmann::json rows = nlohmann::json::array();
        for (Index i = 0; i < M.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    truth["W"] = matrix_json(W);
    truth["H"] = matrix_json(H);
    write_text_file(out + ".truth.json", truth.dump(2) + "\n");
    return kOk;
}

int cmd_verify(const std::string& manifest_path,
               const std::string& input_override) {
    const RunManifest m = read_manifest(manifest_path);
    const fs::path dir = fs::path(manifest_path).parent_path();
    const std::string input =
        input_override.empty() ? m.input_path : input_override;

    const std::string digest = digest_file(input);
    if (digest != m.input_digest) {
        std::fprintf(stderr,
                     "verify: digest mismatch for '%s'\n  manifest %s\n  "
                     "actual   %s\n",
                     input.c_str(), m.input_digest.c_str(), digest.c_str());
        return kVerifyMismatch;
    }

    const NonNegMatrix V = read_matrix(input);
    const NonNegMatrix W = read_matrix(dir / "W.csv");
    const NonNegMatrix H = read_matrix(dir / "H.csv");
    const AlphaParam a(m.config.alpha);
    const double recomputed =
        matrix_objective(a, W, H, V, m.config.eps_floor).value;
    const double gap = std::abs(recomputed - m.final_objective);
    if (gap > 1e-12 * (1.0 + std::abs(m.final_objective))) {
        std::fprintf(stderr,
                     "verify: objective mismatch: manifest %s, recomputed "
                     "%s\n",
                     format_double(m.final_objective).c_str(),
                     format_double(recomputed).c_str());
        return kVerifyMismatch;
    }
    std::printf("verified: digest ok, objective ok\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-negative matrix factorization under the generalized "
                 "dual Kullback-Leibler divergence family"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    FactorizeFlags fac_flags;
    CLI::App* fac = app.add_subcommand(
        "factorize", "factorize a matrix and write W, H, trace, manifest");
    add_factorize_flags(fac, fac_flags, true);

    FactorizeFlags sweep_flags;
    std::string sweep_alphas;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "factorize once per alpha and tabulate fit quality");
    add_factorize_flags(sweep, sweep_flags, false);
    sweep->add_option("--alphas", sweep_alphas, "comma-separated alpha list")
        ->required();

    std::string curve_alphas;
    double mu_min = 0.05, mu_max = 20.0;
    std::size_t points = 201;
    std::string spacing = "log";
    std::string curve_out;
    CLI::App* curve = app.add_subcommand(
        "curve", "emit divergence-vs-mu curves (reference mean fixed at 1)");
    curve->add_option("--alphas", curve_alphas, "comma-separated alpha list")
        ->required();
    curve->add_option("--mu-min", mu_min, "grid start (must be > 0)");
    curve->add_option("--mu-max", mu_max, "grid end");
    curve->add_option("--points", points, "number of grid points");
    curve->add_option("--spacing", spacing, "grid spacing: log or linear");
    curve->add_option("--out", curve_out, "output CSV path")->required();

    std::size_t synth_p = 30, synth_n = 20, synth_rank = 3;
    std::string synth_noise = "none";
    double synth_scale = 0.1;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand(
        "synth", "generate a synthetic low-rank matrix with optional noise");
    synth->add_option("--p", synth_p, "rows");
    synth->add_option("--n", synth_n, "columns");
    synth->add_option("--rank", synth_rank, "ground-truth rank");
    synth->add_option("--noise", synth_noise,
                      "none|gaussian|poisson|gamma|invgauss");
    synth->add_option("--noise-scale", synth_scale,
                      "per-entry coefficient of variation (ignored for "
                      "poisson)");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--out", synth_out, "output matrix path")->required();

    std::string verify_manifest;
    std::string verify_input;
    CLI::App* verify = app.add_subcommand(
        "verify", "check a run directory against its manifest");
    verify->add_option("--manifest", verify_manifest, "manifest.json path")
        ->required();
    verify->add_option("--input", verify_input,
                       "input matrix path (overrides the manifest)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidConfig;
    }

    try {
        if (app.got_subcommand(fac)) return cmd_factorize(fac_flags);
        if (app.got_subcommand(sweep)) return cmd_sweep(sweep_flags,
                                                        sweep_alphas);
        if (app.got_subcommand(curve)) {
            return cmd_curve(curve_alphas, mu_min, mu_max, points, spacing,
                             curve_out);
        }
        if (app.got_subcommand(synth)) {
            return cmd_synth(synth_p, synth_n, synth_rank, synth_noise,
                             synth_scale, synth_seed, synth_out);
        }
        if (app.got_subcommand(verify)) {
            return cmd_verify(verify_manifest, verify_input);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", error_name(e), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kFailure;
}
