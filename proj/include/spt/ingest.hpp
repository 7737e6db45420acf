#pragma once

#include "spt/quadvar.hpp"
#include "spt/simplex.hpp"

#include <iosfwd>
#include <string>

namespace spt {

/// Coarsest accepted grid: monthly.
inline constexpr double kMaxIngestDt = 1.0 / 12.0;

/// Capitalization CSV with header `t,S1,...,Sd` (column names after t are free), one row per
/// grid time in years. Errors name the 1-based file line: ParseError, NonpositiveCap,
/// NonuniformGrid (step differs from the mean step by more than 1e-6 of it), GridTooCoarse.
CapPath read_caps(std::istream& in);
CapPath read_caps(const std::string& file);  // IOError when unreadable

/// Writes `t,S1,...,Sd` with S_i = mu_i, 17 significant digits.
void write_caps_csv(std::ostream& os, const WeightPath& path);

struct EmpiricalGammaH {
    GammaPath gamma;
    double total = 0.0;    // Gamma^H(T)
    double eta_hat = 0.0;  // total / (T - t0)
    double eta_checked = 0.0;
    MonotoneVerdict slope_check;  // slope test with eta = 0.9 eta_hat
};

/// 1/2 sum_i sum_k mu_i (Delta log mu_i)^2 from the weights of the capitalizations.
EmpiricalGammaH empirical_gamma_H(const CapPath& caps);

}  // namespace spt
