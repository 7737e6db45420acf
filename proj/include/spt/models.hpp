#pragma once

#include "spt/genfn.hpp"
#include "spt/quadvar.hpp"
#include "spt/simplex.hpp"

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace spt {

enum class Scheme { EulerMaruyama, Milstein };

std::string_view to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// Field callbacks work on raw arrays so the inner loop stays allocation free.
/// drift: out[d]; diffusion: out[d * m], column-major (column j is driver j);
/// milstein: out[d] = (Db) b for single-driver models.
using FieldFn = std::function<void(double t, const double* x, double* out)>;
/// Exact solution on the grid from the Brownian increments (rows = steps); raw, unstopped.
using ExactFn = std::function<Mat(const TimeGrid& grid, const Mat& dW)>;
/// Models whose state is not the weight vector (driver-based closed forms).
using DriverSimFn = std::function<Mat(const TimeGrid& grid, const Mat& dW, Scheme scheme)>;

struct ModelSpec {
    std::string name;
    std::string id;
    int d = 3;
    int m = 1;
    Vec x0;
    std::map<std::string, double> params;

    FieldFn drift;      // empty means zero drift
    FieldFn diffusion;  // required unless driver_sim is set
    FieldFn milstein;   // optional analytic (Db) b; finite differences otherwise
    CovRateFn cov_rate; // empty means b b'
    ExactFn exact;
    DriverSimFn driver_sim;

    double horizon_cap = std::numeric_limits<double>::infinity();  // freeze at this time
    bool martingale = true;

    std::string anchor;
    std::string summary;
    std::string deflator;
    std::vector<std::string> identities;
    GenFnPtr flow_G;     // Lyapunov flow only
    double gfrak = 0.0;  // Lyapunov flow only

    /// b b' at (t, x), or the custom rate.
    void covariation_rate(double t, const Vec& x, Mat& out) const;
    CovRateFn rate_fn() const;
};

ModelSpec model_expanding_circle(const Vec& v0);
ModelSpec model_expanding_circle_trig(double delta, double u);
ModelSpec model_slowed(const Vec& w0);
ModelSpec model_spiral(double delta);
ModelSpec model_stationary_circle(double delta, double u = 0.0);
ModelSpec model_lyapunov_flow(GenFnPtr G, const Vec& mu0, double gfrak);
ModelSpec model_lyapunov_flow(GenFnPtr G, const Vec& mu0);  // gfrak from a boundary grid search
ModelSpec model_reflected_two_asset(double mu1_0, double kappa);

/// Model id grammar: name[:key=value,...], list values in brackets, e.g. "slowed:w0=[0.5,0.3,0.2]".
ModelSpec parse_model(const std::string& id);
const std::vector<std::string>& zoo_names();

/// T* = log(1 / (6 r(mu0))) for the expanding circle.
double expanding_circle_tstar(const Vec& mu0);
/// T* = -2 log(9 delta) for the spiral.
double spiral_tstar(double delta);
/// Psi on the grid from driver column 1: dPsi = (Psi^2 - delta^2) dB, clamped inside (-delta, delta),
/// frozen after T*.
Vec spiral_psi(double delta, const TimeGrid& grid, const Mat& dW, Scheme scheme);

}  // namespace spt
