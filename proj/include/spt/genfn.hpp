#pragma once

#include "spt/error.hpp"

#include <memory>
#include <optional>
#include <string>

namespace spt {

/// A C^2 function G on the simplex with analytic gradient and Hessian.
///
/// value() accepts boundary points wherever the formula extends continuously
/// (entropy uses 0 log 0 = 0). gradient() and hessian() throw
/// BoundaryEvaluation where the derivative is singular on the boundary.
class GeneratingFunction {
public:
    virtual ~GeneratingFunction() = default;

    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const = 0;
    virtual std::string label() const = 0;
};

using GenFnPtr = std::shared_ptr<const GeneratingFunction>;

/// H(x) = -sum x_i log x_i
GenFnPtr make_entropy();
/// Q(x) = 1 - sum x_i^2
GenFnPtr make_quadratic();
/// R(x) = (prod x_i)^(1/d)
GenFnPtr make_geometric_mean();
/// F(x) = x_1^q, q >= 1
GenFnPtr make_power(double q);

/// scale * (G - shift), with value/gradient/Hessian transformed exactly.
GenFnPtr make_affine(GenFnPtr base, double scale, double shift, std::string label);
/// G / G(mu0)
GenFnPtr make_normalized(GenFnPtr base, const Vec& mu0);
/// (G - h) * 3 / (eta T)
GenFnPtr make_shift_scaled(GenFnPtr base, double h, double eta, double T);

/// Parsed generator id, e.g. "geom_mean", "power:q=2", "quadratic|normalize",
/// "entropy|shift_scale:h=0,eta=1,T=0.5". Normalization needs mu(0) and is applied by resolve().
struct GenSpec {
    std::string base;  // entropy | quadratic | geom_mean | power
    double q = 1.0;
    enum class Modifier { None, Normalize, ShiftScale } modifier = Modifier::None;
    double h = 0.0, eta = 1.0, T = 1.0;

    static GenSpec parse(const std::string& id);
    GenFnPtr base_function() const;
    GenFnPtr resolve(const Vec& mu0) const;
    std::string id() const;
};

inline GenFnPtr parse_generating_function(const std::string& id, const Vec& mu0) {
    return GenSpec::parse(id).resolve(mu0);
}

/// Cyclic gradient differences and the Lyapunov-flow normalizer (d = 3):
/// sigma_1 = D3G - D2G, sigma_2 = D1G - D3G, sigma_3 = D2G - D1G, L = -1/2 sigma' D^2G sigma.
struct LyapunovSigma {
    Vec sigma;
    double L = 0.0;
};

/// Navel test threshold on |sigma|.
inline constexpr double kNavelTol = 1e-10;

/// Throws AtNavel when |sigma| < kNavelTol and NonpositiveL when L <= 0.
LyapunovSigma lyapunov_sigma(const GeneratingFunction& G, const Vec& x);

/// Numerical supremum of G over the simplex boundary and maximum over the simplex (d = 3),
/// by grid search with the given number of subdivisions per edge.
struct GapConstants {
    double boundary_sup = 0.0;  // the constant written g in the flow construction
    double max_value = 0.0;
    Vec argmax;
};
GapConstants gap_constants(const GeneratingFunction& G, int subdivisions = 600);

}  // namespace spt
