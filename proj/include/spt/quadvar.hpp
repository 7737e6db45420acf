#pragma once

#include "spt/genfn.hpp"
#include "spt/simplex.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace spt {

enum class CovSource { Realized, Analytic };

/// Per-step covariation increments d<mu_i, mu_j>; increments[k] covers [t_k, t_{k+1}].
struct CovariationPath {
    TimeGrid grid;
    std::vector<Mat> increments;
    CovSource source = CovSource::Realized;
};

/// Instantaneous covariation rate c(t, x), so that d<mu_i, mu_j> = c_ij dt.
using CovRateFn = std::function<void(double t, const Vec& x, Mat& out)>;

/// Outer products of path increments.
CovariationPath realized_cov(const WeightPath& path);
/// Left-point rate times dt; zero on and after the stop index.
CovariationPath analytic_cov(const WeightPath& path, const CovRateFn& rate);

/// Cumulative values on the grid, starting at 0.
struct GammaPath {
    TimeGrid grid;
    Vec values;

    double final() const { return values[values.size() - 1]; }
    double increment(std::size_t k) const {
        return values[static_cast<Eigen::Index>(k + 1)] - values[static_cast<Eigen::Index>(k)];
    }
};

/// Gamma^G(t_{k+1}) = Gamma^G(t_k) - 1/2 sum_ij D2_ij G(mu(t_k)) cov_k[i][j], frozen after the stop index.
GammaPath gamma_G(const GeneratingFunction& G, const WeightPath& path, const CovariationPath& cov);

/// 1/2 sum_i sum_k mu_i(t_k) (Delta log mu_i(t_k))^2. Throws NonpositiveWeight.
/// Steps at or after the stop index contribute nothing.
GammaPath gamma_H_weighted(const WeightPath& path);

/// alpha = covariation increment / trace; the trace is the Gamma^Q increment.
struct AlphaPath {
    TimeGrid grid;
    std::vector<Mat> alpha;
    Vec gammaQ_increments;
    std::vector<bool> degenerate;  // trace <= kAlphaTraceFloor
};
inline constexpr double kAlphaTraceFloor = 1e-14;
AlphaPath alpha_decompose(const CovariationPath& cov);

/// Eigen-decomposition of a symmetric 3x3 matrix by the trigonometric closed form.
struct SymEigen3 {
    std::array<double, 3> values{};  // ascending
    Eigen::Matrix3d vectors;         // columns match values
};
std::array<double, 3> eigen_sym3(const Eigen::Matrix3d& m);
SymEigen3 eigen_sym3_vectors(const Eigen::Matrix3d& m);

struct MonotoneVerdict {
    bool holds = true;
    std::optional<std::size_t> first_violation;
    double max_violation = 0.0;  // largest shortfall below the required increment
};

/// Gamma(t_{k+1}) - Gamma(t_k) >= eta dt - 1e-10 for every step inside [t0, t0 + window].
MonotoneVerdict slope_monotone_check(const GammaPath& g, double eta, double window);
/// 2 dGamma^H >= dGamma^Q - 1e-10 per step.
MonotoneVerdict excess_dominance_check(const GammaPath& gH, const GammaPath& gQ);

/// max of sum_ij |D2_ij G| over {min x_i >= 1/n} on a grid with pitch 1/(50 n); d in {2, 3}.
double lemma_K(const GeneratingFunction& G, int n, int d = 3);
/// C = 2 eta / K_n.
double lemma_C_constant(const GeneratingFunction& G, int n, double eta, int d = 3);

void write_gamma_csv(std::ostream& os, const GammaPath& g, const std::string& column = "value");
void write_alpha_csv(std::ostream& os, const AlphaPath& a);

}  // namespace spt
