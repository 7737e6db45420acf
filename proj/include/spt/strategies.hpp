#pragma once

#include "spt/genfn.hpp"
#include "spt/quadvar.hpp"
#include "spt/simplex.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace spt {

/// Holdings theta(t_k) in shares of the market weights; rows are times.
struct Strategy {
    TimeGrid grid;
    Mat holdings;
    std::string label;
};

struct WealthPath {
    TimeGrid grid;
    Vec values;

    double at(std::size_t k) const { return values[static_cast<Eigen::Index>(k)]; }
    double final() const { return values[values.size() - 1]; }
};

/// V(t_{k+1}) = V(t_k) + theta(t_k) . (mu(t_{k+1}) - mu(t_k)), V(t_0) = theta(t_0) . mu(t_0).
WealthPath wealth_selffinancing(const Strategy& s, const WeightPath& path);

/// Smallest holding over the grid (long-only means >= -1e-12).
double min_holding(const Strategy& s);
inline constexpr double kLongOnlyTol = 1e-12;
inline bool long_only(const Strategy& s) { return min_holding(s) >= -kLongOnlyTol; }

/// A strategy together with the wealth given by its closed formula.
struct Generated {
    Strategy strategy;
    WealthPath wealth;
    GammaPath gamma;
};

/// phi_i = D_iG + Gamma + G - sum_j mu_j D_jG, wealth G(mu) + Gamma.
/// From the stop index on, holdings are those of the last interior point and wealth is frozen.
Generated additive_generate(const GeneratingFunction& G, const WeightPath& path, const CovariationPath& cov);

/// Z = G(mu) exp(sum_{j<k} dGamma_j / G(mu_j)), psi_i = Z (1 + (D_iG - sum_j mu_j D_jG) / G).
inline constexpr double kGeneratorFloor = 1e-8;
Generated multiplicative_generate(const GeneratingFunction& G, const WeightPath& path, const CovariationPath& cov);

struct PowerResult {
    Generated gen;
    double max_psi = 0.0;  // bounded by 1 in the arbitrage construction
};
/// F = x_1^q: psi_1 = (q / mu_1 + 1 - q) Z, psi_i = (1 - q) Z,
/// Z = mu_1^q exp(-q (q - 1) / 2 sum mu_1^-2 d<mu_1>).
PowerResult power_psi(double q, const WeightPath& path, const CovariationPath& cov);

/// psi = b before tau, b + phi - V_phi(tau) from tau on (componentwise); no tau keeps b.
Strategy concat(double b, std::optional<std::size_t> tau, const Strategy& phi, const WealthPath& v_phi);
/// The matching wealth b + (V_phi - V_phi(tau)) 1{k >= tau}.
WealthPath concat_wealth(double b, std::optional<std::size_t> tau, const WealthPath& v_phi);

/// q = 1 + (2 / (eta T)) log(1 / mu_1(0)) + 0.5.
double one_asset_q(double T, double eta, double mu1_0);

struct OneAssetResult {
    Strategy strategy;
    WealthPath wealth;  // 1 + nu_1(0)^q - Z
    double q = 0.0;
    double max_psi = 0.0;
    WeightPath nu;  // market stopped when mu_1 <= mu_1(0) / 2
    double excess_at(std::size_t k) const;  // nu_1(0)^q - Z(t_k), computed without the leading 1
    Vec Z;
};
/// rate empty: realized covariation of the stopped path.
OneAssetResult one_asset_arbitrage(double T, double eta, const WeightPath& path, const CovRateFn& rate = {});

struct SwitchingResult {
    Strategy strategy;
    WealthPath wealth;          // self-financing wealth of the concatenated strategy
    WealthPath formula_wealth;  // 1 + (V_phi - V_phi(tau)) 1{k >= tau}
    std::optional<std::size_t> tau;
    Vec lower_bound;            // 1{t < tau} + 3 (t - tau) / T 1{t >= tau}
    MonotoneVerdict slope;      // Gamma^G slope check with eta on [0, T]
};
SwitchingResult switching_arbitrage(const GenFnPtr& G, double h, double eta, double T, const WeightPath& path,
                                    const CovariationPath& cov);

void write_strategy_csv(std::ostream& os, const Strategy& s, const WealthPath& v);

}  // namespace spt
