#pragma once

#include "spt/engine.hpp"
#include "spt/strategies.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spt {

/// A strategy evaluated on one path, with the wealth given by its closed formula.
struct StrategyRun {
    Strategy strategy;
    WealthPath formula;
};
using StrategyFn = std::function<StrategyRun(const WeightPath& path, const CovariationPath& cov)>;

/// Strategy selection for experiments.
///   market          theta = 1
///   additive        generated additively by G
///   multiplicative  generated multiplicatively by G
///   one_asset       the long-only power construction (eta defaults to kappa^2 on reflected2)
///   switching       hold the market, switch to (G - h) 3 / (eta T) when G drops below h + eta T / 3
struct StrategySpec {
    std::string kind = "market";
    std::string G = "quadratic|normalize";
    std::optional<double> eta;
    double h = 0.0;

    std::string label() const;
};

StrategyFn make_strategy(const StrategySpec& s, const ModelSpec& model, double T);

/// Per-path outcome used by the verdict.
struct PathOutcome {
    double v_final = 0.0;
    double v_min = 0.0;
    double oracle_error = 0.0;  // max |formula - self-financing| over the grid
};

struct ArbVerdict {
    std::size_t n_paths = 0;
    double frac_ge = 0.0;  // V(T) >= 1 - tol
    double frac_gt = 0.0;  // V(T) > 1 + tol
    double v_min = 0.0, v_max = 0.0, v_mean = 0.0;
    std::size_t negative_paths = 0;  // paths where V < -tol somewhere
    double K = 0.0;                  // measured oracle error / dt
    double tol = 0.0;                // 1e-6 + K dt
    std::string classification;
};

/// strong-arb-consistent: no negative wealth, every V(T) > 1 + tol.
/// arb-consistent: no negative wealth, every V(T) >= 1 - tol, some V(T) > 1 + tol.
/// inconsistent: anything else.
std::string classify(const ArbVerdict& v);

/// Verdict from per-path outcomes (in path order) on a grid with step dt.
ArbVerdict summarize_outcomes(const std::vector<PathOutcome>& outcomes, double dt);

/// Simulate cfg.n_paths paths, run the strategy on each and classify V(T) from the
/// self-financing sum. The covariation is analytic unless realized is requested.
ArbVerdict arb_verdict(const ModelSpec& model, const SimConfig& cfg, const StrategyFn& strategy,
                       bool realized = false);

struct HorizonReport {
    std::string G;
    double G0 = 0.0;
    double eta = 0.0;
    double threshold = 0.0;  // G(mu0) / eta
    std::vector<std::pair<double, ArbVerdict>> tested;
};
HorizonReport horizon_threshold(const GeneratingFunction& G, const Vec& mu0, double eta);
/// Threshold plus verdicts of the additive G / G(mu0) strategy at each horizon.
HorizonReport horizon_sweep(const ModelSpec& model, const SimConfig& cfg, const std::string& G_id, double eta,
                            const std::vector<double>& horizons);

struct AssetMean {
    double mu0 = 0.0, mean = 0.0, se = 0.0, z = 0.0;
};
struct GrowthStat {
    double mean = 0.0, se = 0.0, expected = 0.0, z = 0.0;
};
struct MartingaleReport {
    std::vector<AssetMean> assets;
    double max_abs_z = 0.0;
    bool pass = true;  // |z| <= 3 for every asset
    std::optional<GrowthStat> growth;
};
inline constexpr double kMartingaleZ = 3.0;
inline constexpr std::size_t kMartingaleMinPaths = 100;

/// Sample mean of mu_i(T ^ stop) against mu_i(0) with standard errors.
MartingaleReport martingale_mean_test(const std::vector<Vec>& finals, const Vec& mu0);
/// Mean, standard error and z-score of samples against an expected value.
GrowthStat growth_statistic(const std::vector<double>& samples, double expected);

struct IdentityCheck {
    std::string name;
    double max_dev = 0.0;
    double tol = 0.0;
    bool pass = true;
};

struct HittingStats {
    std::size_t n_hit = 0;
    double min = 0.0, max = 0.0, mean = 0.0;
};

/// Count, range and mean of boundary exit times (in path order).
HittingStats hitting_stats(const std::vector<double>& exit_times);

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    std::optional<MartingaleReport> martingale;  // needs at least kMartingaleMinPaths paths
    HittingStats hitting;
    std::vector<std::pair<std::string, double>> extras;  // diagnostics such as the smallest alpha eigenvalue
    bool all_pass() const;
};

/// Runs every identity listed by the model on cfg.n_paths simulated paths (and, where the
/// model has one, the exact oracle on the same increments).
IdentityReport identity_suite(const ModelSpec& model, const SimConfig& cfg);

/// Default horizon for experiments on a model when none is configured.
double default_horizon(const ModelSpec& model, double dt);

}  // namespace spt
