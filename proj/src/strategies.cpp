#include "spt/strategies.hpp"

#include "spt/engine.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace spt {

namespace {

// Grid index from which holdings are frozen: the stop index if that point is interior,
// else the one before it. Returns n_points when the path never stops.
std::size_t holding_limit(const WeightPath& path) {
    if (!path.stop_index()) return path.n_points();
    const std::size_t s = *path.stop_index();
    const bool interior = path.points().row(static_cast<Eigen::Index>(s)).minCoeff() > 0.0;
    return (interior || s == 0) ? s : s - 1;
}

void check_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (!a.same_as(b)) throw Error(ErrorCode::GridMismatch, what);
}

}  // namespace

WealthPath wealth_selffinancing(const Strategy& s, const WeightPath& path) {
    check_grid(s.grid, path.grid(), "strategy and path grids differ");
    if (s.holdings.rows() != static_cast<Eigen::Index>(path.n_points()) ||
        s.holdings.cols() != static_cast<Eigen::Index>(path.dim()))
        throw Error(ErrorCode::GridMismatch, "holdings shape does not match the path");
    const Mat& p = path.points();
    WealthPath v{path.grid(), Vec(p.rows())};
    v.values[0] = s.holdings.row(0).dot(p.row(0));
    for (Eigen::Index k = 0; k + 1 < p.rows(); ++k)
        v.values[k + 1] = v.values[k] + s.holdings.row(k).dot(p.row(k + 1) - p.row(k));
    return v;
}

double min_holding(const Strategy& s) { return s.holdings.size() ? s.holdings.minCoeff() : 0.0; }

Generated additive_generate(const GeneratingFunction& G, const WeightPath& path, const CovariationPath& cov) {
    Generated out;
    out.gamma = gamma_G(G, path, cov);
    const auto n = static_cast<Eigen::Index>(path.n_points());
    const auto d = static_cast<Eigen::Index>(path.dim());
    const auto limit = static_cast<Eigen::Index>(holding_limit(path));
    const auto stop = static_cast<Eigen::Index>(path.stop_index().value_or(path.n_points()));
    out.strategy = {path.grid(), Mat(n, d), "additive(" + G.label() + ")"};
    out.wealth = {path.grid(), Vec(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Vec x = path.point(static_cast<std::size_t>(k));
        if (k <= stop) out.wealth.values[k] = G.value(x) + out.gamma.values[k];
        else out.wealth.values[k] = out.wealth.values[stop];
        if (k > limit) {
            out.strategy.holdings.row(k) = out.strategy.holdings.row(limit);
            continue;
        }
        const Vec g = G.gradient(x);
        const double c = out.gamma.values[k] + G.value(x) - x.dot(g);
        out.strategy.holdings.row(k) = (g.array() + c).matrix().transpose();
    }
    return out;
}

Generated multiplicative_generate(const GeneratingFunction& G, const WeightPath& path, const CovariationPath& cov) {
    Generated out;
    out.gamma = gamma_G(G, path, cov);
    const auto n = static_cast<Eigen::Index>(path.n_points());
    const auto d = static_cast<Eigen::Index>(path.dim());
    const auto limit = static_cast<Eigen::Index>(holding_limit(path));
    const auto stop = static_cast<Eigen::Index>(path.stop_index().value_or(path.n_points()));
    out.strategy = {path.grid(), Mat(n, d), "multiplicative(" + G.label() + ")"};
    out.wealth = {path.grid(), Vec(n)};
    double log_factor = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Vec x = path.point(static_cast<std::size_t>(k));
        const double g = G.value(x);
        const bool needs_inverse = k <= limit;
        if (needs_inverse && !(g > kGeneratorFloor)) {
            std::ostringstream os;
            os << "G(mu) = " << g << " at step " << k;
            throw Error(ErrorCode::GeneratorNearZero, os.str());
        }
        const double Z = g * std::exp(log_factor);
        out.wealth.values[k] = k <= stop ? Z : out.wealth.values[stop];
        if (k <= limit) {
            const Vec grad = G.gradient(x);
            const double c = x.dot(grad);
            out.strategy.holdings.row(k) = (Z * (1.0 + (grad.array() - c) / g)).matrix().transpose();
        } else {
            out.strategy.holdings.row(k) = out.strategy.holdings.row(limit);
        }
        if (k + 1 < n) log_factor += out.gamma.increment(static_cast<std::size_t>(k)) / (k < stop ? g : 1.0);
    }
    return out;
}

PowerResult power_psi(double q, const WeightPath& path, const CovariationPath& cov) {
    if (!(q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "power strategy needs q >= 1");
    check_grid(cov.grid, path.grid(), "covariation and path grids differ");
    PowerResult out;
    Generated& gen = out.gen;
    const auto n = static_cast<Eigen::Index>(path.n_points());
    const auto d = static_cast<Eigen::Index>(path.dim());
    const auto limit = static_cast<Eigen::Index>(holding_limit(path));
    const auto stop = static_cast<Eigen::Index>(path.stop_index().value_or(path.n_points()));
    std::ostringstream label;
    label << "power(q=" << q << ")";
    gen.strategy = {path.grid(), Mat(n, d), label.str()};
    gen.wealth = {path.grid(), Vec(n)};
    gen.gamma = {path.grid(), Vec::Zero(n)};
    const double c = 0.5 * q * (q - 1.0);
    double integral = 0.0;  // sum mu_1^-2 d<mu_1>
    for (Eigen::Index k = 0; k < n; ++k) {
        const double m1 = path.weight(static_cast<std::size_t>(k), 0);
        if (k <= limit && !(m1 > kGeneratorFloor)) {
            std::ostringstream os;
            os << "mu_1 = " << m1 << " at step " << k;
            throw Error(ErrorCode::Mu1NearZero, os.str());
        }
        const double Z = std::pow(m1, q) * std::exp(-c * integral);
        gen.wealth.values[k] = k <= stop ? Z : gen.wealth.values[stop];
        if (k <= limit) {
            gen.strategy.holdings.row(k).setConstant((1.0 - q) * Z);
            gen.strategy.holdings(k, 0) = (q / m1 + 1.0 - q) * Z;
            out.max_psi = std::max(out.max_psi, gen.strategy.holdings.row(k).maxCoeff());
        } else {
            gen.strategy.holdings.row(k) = gen.strategy.holdings.row(limit);
        }
        if (k + 1 < n) {
            const double inc = k < stop ? cov.increments[static_cast<std::size_t>(k)](0, 0) / (m1 * m1) : 0.0;
            integral += inc;
            gen.gamma.values[k + 1] = gen.gamma.values[k] + c * std::pow(m1, q) * inc;
        }
    }
    return out;
}

Strategy concat(double b, std::optional<std::size_t> tau, const Strategy& phi, const WealthPath& v_phi) {
    check_grid(phi.grid, v_phi.grid, "strategy and wealth grids differ");
    Strategy s{phi.grid, Mat::Constant(phi.holdings.rows(), phi.holdings.cols(), b), "concat(" + phi.label + ")"};
    if (!tau) return s;
    const auto t0 = static_cast<Eigen::Index>(*tau);
    const double shift = b - v_phi.values[t0];
    for (Eigen::Index k = t0; k < s.holdings.rows(); ++k) s.holdings.row(k) = (phi.holdings.row(k).array() + shift).matrix();
    return s;
}

WealthPath concat_wealth(double b, std::optional<std::size_t> tau, const WealthPath& v_phi) {
    WealthPath v{v_phi.grid, Vec::Constant(v_phi.values.size(), b)};
    if (!tau) return v;
    const auto t0 = static_cast<Eigen::Index>(*tau);
    for (Eigen::Index k = t0; k < v.values.size(); ++k) v.values[k] = b + v_phi.values[k] - v_phi.values[t0];
    return v;
}

double one_asset_q(double T, double eta, double mu1_0) {
    if (!(T > 0.0) || !(eta > 0.0) || !(mu1_0 > 0.0) || !(mu1_0 < 1.0))
        throw Error(ErrorCode::InvalidArgument, "one-asset arbitrage needs T > 0, eta > 0 and mu_1(0) in (0, 1)");
    return 1.0 + (2.0 / (eta * T)) * std::log(1.0 / mu1_0) + 0.5;
}

double OneAssetResult::excess_at(std::size_t k) const {
    return std::pow(nu.weight(0, 0), q) - Z[static_cast<Eigen::Index>(k)];
}

OneAssetResult one_asset_arbitrage(double T, double eta, const WeightPath& path, const CovRateFn& rate) {
    const double mu1_0 = path.weight(0, 0);
    const double q = one_asset_q(T, eta, mu1_0);
    WeightPath nu = boundary_stop(path, StopRule::mu1_halved(mu1_0));
    const CovariationPath cov = rate ? analytic_cov(nu, rate) : realized_cov(nu);
    PowerResult pw = power_psi(q, nu, cov);
    const double lead = 1.0 + std::pow(mu1_0, q);
    OneAssetResult out{{nu.grid(), (lead - pw.gen.strategy.holdings.array()).matrix(), "one_asset_arbitrage"},
                       {nu.grid(), (lead - pw.gen.wealth.values.array()).matrix()},
                       q,
                       pw.max_psi,
                       std::move(nu),
                       pw.gen.wealth.values};
    std::ostringstream label;
    label << "one_asset_arbitrage(q=" << q << ")";
    out.strategy.label = label.str();
    return out;
}

SwitchingResult switching_arbitrage(const GenFnPtr& G, double h, double eta, double T, const WeightPath& path,
                                    const CovariationPath& cov) {
    SwitchingResult out;
    const GenFnPtr star = make_shift_scaled(G, h, eta, T);
    out.slope = slope_monotone_check(gamma_G(*G, path, cov), eta, std::min(T, path.grid().horizon() - path.grid().t0));
    const double level = h + eta * T / 3.0;
    const TimeGrid& grid = path.grid();
    for (std::size_t k = 0; k < path.n_points() && grid.time(k) <= grid.t0 + 0.5 * T + 1e-9 * grid.dt; ++k) {
        if (G->value(path.point(k)) < level) {
            out.tau = k;
            break;
        }
    }
    const auto n = static_cast<Eigen::Index>(path.n_points());
    out.lower_bound = Vec::Ones(n);
    if (!out.tau) {
        out.strategy = {grid, Mat::Ones(n, static_cast<Eigen::Index>(path.dim())), "switching(no switch)"};
        out.wealth = wealth_selffinancing(out.strategy, path);
        out.formula_wealth = {grid, Vec::Ones(n)};
        return out;
    }
    const Generated phi = additive_generate(*star, path, cov);
    out.strategy = concat(1.0, out.tau, phi.strategy, phi.wealth);
    out.strategy.label = "switching(" + star->label() + ")";
    out.wealth = wealth_selffinancing(out.strategy, path);
    out.formula_wealth = concat_wealth(1.0, out.tau, phi.wealth);
    const double t_tau = grid.time(*out.tau);
    for (Eigen::Index k = static_cast<Eigen::Index>(*out.tau); k < n; ++k)
        out.lower_bound[k] = 3.0 * (grid.time(static_cast<std::size_t>(k)) - t_tau) / T;
    return out;
}

void write_strategy_csv(std::ostream& os, const Strategy& s, const WealthPath& v) {
    os << 't';
    for (Eigen::Index i = 1; i <= s.holdings.cols(); ++i) os << ",theta" << i;
    os << ",V\n";
    os.precision(17);
    for (Eigen::Index k = 0; k < s.holdings.rows(); ++k) {
        os << s.grid.time(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < s.holdings.cols(); ++i) os << ',' << s.holdings(k, i);
        os << ',' << v.values[k] << '\n';
    }
}

}  // namespace spt
