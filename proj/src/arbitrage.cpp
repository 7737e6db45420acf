#include "spt/arbitrage.hpp"

#include "spt/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace spt {

std::string StrategySpec::label() const {
    std::ostringstream os;
    os << kind;
    if (kind == "additive" || kind == "multiplicative") os << ':' << G;
    if (kind == "switching") os << ":G=" << G << ",h=" << shortest(h);
    if (kind == "one_asset" && eta) os << ":eta=" << shortest(*eta);
    if (kind == "switching" && eta) os << ",eta=" << shortest(*eta);
    return os.str();
}

StrategyFn make_strategy(const StrategySpec& s, const ModelSpec& model, double T) {
    if (s.kind == "market") {
        return [](const WeightPath& path, const CovariationPath&) {
            const auto n = static_cast<Eigen::Index>(path.n_points());
            return StrategyRun{{path.grid(), Mat::Ones(n, static_cast<Eigen::Index>(path.dim())), "market"},
                               {path.grid(), Vec::Ones(n)}};
        };
    }
    if (s.kind == "additive" || s.kind == "multiplicative") {
        const GenFnPtr G = parse_generating_function(s.G, model.x0);
        const bool additive = s.kind == "additive";
        return [G, additive](const WeightPath& path, const CovariationPath& cov) {
            Generated g = additive ? additive_generate(*G, path, cov) : multiplicative_generate(*G, path, cov);
            return StrategyRun{std::move(g.strategy), std::move(g.wealth)};
        };
    }
    if (s.kind == "one_asset") {
        double eta = 0.0;
        if (s.eta) eta = *s.eta;
        else if (model.params.count("kappa")) eta = model.params.at("kappa") * model.params.at("kappa");
        else throw Error(ErrorCode::ConfigError, "eta: required for one_asset on " + model.name);
        const CovRateFn rate = model.rate_fn();
        return [T, eta, rate](const WeightPath& path, const CovariationPath& cov) {
            OneAssetResult r = one_asset_arbitrage(T, eta, path, cov.source == CovSource::Analytic ? rate : CovRateFn{});
            return StrategyRun{std::move(r.strategy), std::move(r.wealth)};
        };
    }
    if (s.kind == "switching") {
        if (!s.eta) throw Error(ErrorCode::ConfigError, "eta: required for switching");
        const GenFnPtr G = parse_generating_function(s.G, model.x0);
        const double eta = *s.eta, h = s.h;
        return [G, h, eta, T](const WeightPath& path, const CovariationPath& cov) {
            SwitchingResult r = switching_arbitrage(G, h, eta, T, path, cov);
            return StrategyRun{std::move(r.strategy), std::move(r.formula_wealth)};
        };
    }
    throw Error(ErrorCode::ConfigError, "strategy: unknown kind '" + s.kind + "'");
}

std::string classify(const ArbVerdict& v) {
    if (v.n_paths == 0 || v.negative_paths > 0) return "inconsistent";
    if (v.frac_gt == 1.0) return "strong-arb-consistent";
    if (v.frac_ge == 1.0 && v.frac_gt > 0.0) return "arb-consistent";
    return "inconsistent";
}

ArbVerdict summarize_outcomes(const std::vector<PathOutcome>& outcomes, double dt) {
    ArbVerdict v;
    v.n_paths = outcomes.size();
    double err = 0.0;
    for (const auto& o : outcomes) err = std::max(err, o.oracle_error);
    v.K = err / dt;
    v.tol = 1e-6 + v.K * dt;
    std::size_t ge = 0, gt = 0;
    KahanSum sum;
    v.v_min = std::numeric_limits<double>::infinity();
    v.v_max = -v.v_min;
    for (const auto& o : outcomes) {
        ge += o.v_final >= 1.0 - v.tol;
        gt += o.v_final > 1.0 + v.tol;
        v.negative_paths += o.v_min < -v.tol;
        v.v_min = std::min(v.v_min, o.v_final);
        v.v_max = std::max(v.v_max, o.v_final);
        sum.add(o.v_final);
    }
    if (v.n_paths) {
        const auto n = static_cast<double>(v.n_paths);
        v.frac_ge = static_cast<double>(ge) / n;
        v.frac_gt = static_cast<double>(gt) / n;
        v.v_mean = sum.value() / n;
    } else {
        v.v_min = v.v_max = 0.0;
    }
    v.classification = classify(v);
    return v;
}

ArbVerdict arb_verdict(const ModelSpec& model, const SimConfig& cfg, const StrategyFn& strategy, bool realized) {
    const CovRateFn rate = model.rate_fn();
    const auto outcomes = map_paths(model, cfg, [&](std::size_t, const WeightPath& path, const Mat&) {
        const CovariationPath cov = realized ? realized_cov(path) : analytic_cov(path, rate);
        const StrategyRun run = strategy(path, cov);
        const WealthPath v = wealth_selffinancing(run.strategy, path);
        return PathOutcome{v.final(), v.values.minCoeff(), (v.values - run.formula.values).cwiseAbs().maxCoeff()};
    });
    return summarize_outcomes(outcomes, cfg.dt);
}

HorizonReport horizon_threshold(const GeneratingFunction& G, const Vec& mu0, double eta) {
    HorizonReport r;
    r.G = G.label();
    r.G0 = G.value(mu0);
    r.eta = eta;
    if (!(r.G0 > 0.0) || !(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon threshold needs G(mu0) > 0 and eta > 0");
    r.threshold = r.G0 / eta;
    return r;
}

HorizonReport horizon_sweep(const ModelSpec& model, const SimConfig& cfg, const std::string& G_id, double eta,
                            const std::vector<double>& horizons) {
    GenSpec gs = GenSpec::parse(G_id);
    gs.modifier = GenSpec::Modifier::None;
    HorizonReport r = horizon_threshold(*gs.base_function(), model.x0, eta);
    gs.modifier = GenSpec::Modifier::Normalize;
    StrategySpec s;
    s.kind = "additive";
    s.G = gs.id();
    for (double T : horizons) {
        SimConfig c = cfg;
        c.T = T;
        r.tested.emplace_back(T, arb_verdict(model, c, make_strategy(s, model, T)));
    }
    return r;
}

namespace {

// Mean and standard error of the samples y, both compensated.
std::pair<double, double> mean_se(const std::vector<double>& y) {
    const auto n = static_cast<double>(y.size());
    KahanSum s;
    for (double v : y) s.add(v);
    const double mean = s.value() / n;
    KahanSum ss;
    for (double v : y) ss.add((v - mean) * (v - mean));
    const double var = y.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

double z_score(double diff, double se) {
    if (se > 0.0) return diff / se;
    return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

MartingaleReport martingale_mean_test(const std::vector<Vec>& finals, const Vec& mu0) {
    if (finals.empty()) throw Error(ErrorCode::InvalidArgument, "martingale test needs at least one path");
    MartingaleReport r;
    std::vector<double> y(finals.size());
    for (Eigen::Index i = 0; i < mu0.size(); ++i) {
        // Work with deviations from mu_i(0) so that a constant ensemble gives z = 0 exactly.
        for (std::size_t p = 0; p < finals.size(); ++p) y[p] = finals[p][i] - mu0[i];
        const auto [m, se] = mean_se(y);
        AssetMean a{mu0[i], mu0[i] + m, se, z_score(m, se)};
        r.max_abs_z = std::max(r.max_abs_z, std::abs(a.z));
        r.assets.push_back(a);
    }
    r.pass = r.max_abs_z <= kMartingaleZ;
    return r;
}

GrowthStat growth_statistic(const std::vector<double>& samples, double expected) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "growth statistic needs samples");
    std::vector<double> y(samples.size());
    for (std::size_t p = 0; p < samples.size(); ++p) y[p] = samples[p] - expected;
    const auto [m, se] = mean_se(y);
    return {expected + m, se, expected, z_score(m, se)};
}

HittingStats hitting_stats(const std::vector<double>& exit_times) {
    HittingStats h;
    if (exit_times.empty()) return h;
    h.n_hit = exit_times.size();
    h.min = *std::min_element(exit_times.begin(), exit_times.end());
    h.max = *std::max_element(exit_times.begin(), exit_times.end());
    KahanSum s;
    for (double t : exit_times) s.add(t);
    h.mean = s.value() / static_cast<double>(h.n_hit);
    return h;
}

bool IdentityReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

double default_horizon(const ModelSpec& model, double dt) {
    auto round_up = [dt](double x) { return std::ceil(x / dt - 1e-9) * dt; };
    if (model.name == "slowed") return round_up(2.0 / 3.0 - model.params.at("r0") + 0.01);
    if (model.name == "lyapunov_flow") return round_up(model.params.at("G0") + 0.01);
    if (model.name == "expanding_circle") return round_up(2.0);
    return round_up(1.0);
}

namespace {

// Realized wealth of Q* on the stationary circle is off by the sampling error of the
// realized quadratic variation, of order sqrt(dt); at dt = 1e-4 a pinned K = 20 covers it.
constexpr double kRealizedK = 20.0;

double tolerance_for(const std::string& name, double dt) {
    static const std::map<std::string, double> fixed = {
        {"sum_to_one", 1e-12},           {"excess_growth_dominance", 1e-10}, {"r_exponential", 1e-2},
        {"sum_squares_circle", 1e-12},   {"hitting_time_lower_bound", 1e-3}, {"r_linear", 1e-3},
        {"gammaQ_equals_t", 1e-10},      {"stop_lower_bound", 1e-3},         {"sum_squares_spiral", 1e-12},
        {"gammaQ_slope", 1e-10},         {"alpha_rank_two", 0.0},            {"sum_squares_constant", 1e-12},
        {"qstar_wealth", 1e-10},         {"G_decreases_linearly", 1e-3},     {"gammaG_equals_t", 1e-10},
        {"exit_time_bounds", 2e-3},      {"alpha_eigenvalues_01", 1e-12},    {"fold_range", 0.0},
        {"martingale_mean", kMartingaleZ},
    };
    if (name == "qstar_wealth_realized") return 1e-6 + kRealizedK * dt;
    auto it = fixed.find(name);
    if (it == fixed.end()) throw Error(ErrorCode::InvalidArgument, "no tolerance for identity '" + name + "'");
    return it->second;
}

struct PathIdentities {
    std::vector<double> dev;
    Vec final;
    double hit_time = std::numeric_limits<double>::infinity();
    bool hit = false;
    double growth = 0.0;      // stationary circle: (V(T) - 1) / T of Q*
    double min_lambda2 = std::numeric_limits<double>::infinity();
};

// Lazily computed per-path inputs shared by the identity checks.
class PathContext {
public:
    PathContext(const ModelSpec& m, const SimConfig& cfg, const WeightPath& p, const Mat& dW)
        : model(m), cfg(cfg), path(p), dW(dW), grid(p.grid()) {}

    const ModelSpec& model;
    const SimConfig& cfg;
    const WeightPath& path;
    const Mat& dW;
    const TimeGrid& grid;

    // Points strictly before the stop index (all points when the path never stops).
    std::size_t limit() const { return path.stop_index().value_or(path.n_points()); }

    const CovariationPath& cov() {
        if (!cov_) cov_ = analytic_cov(path, model.rate_fn());
        return *cov_;
    }
    const WeightPath& oracle() {
        if (!oracle_) oracle_.emplace(exact_with_noise(model, grid, dW, cfg.boundary_epsilon));
        return *oracle_;
    }
    const GammaPath& gammaQ() {
        if (!gQ_) gQ_ = gamma_G(*make_quadratic(), path, cov());
        return *gQ_;
    }

private:
    std::optional<CovariationPath> cov_;
    std::optional<WeightPath> oracle_;
    std::optional<GammaPath> gQ_;
};

double sum_squares(const Mat& p, Eigen::Index k) { return p.row(k).squaredNorm(); }

// Rows of a column-major matrix are strided; copy before the raw-pointer call.
double radial_at(const Mat& p, Eigen::Index k) {
    const double x[3] = {p(k, 0), p(k, 1), p(k, 2)};
    return radial_r_unchecked(x);
}

double check_identity(const std::string& name, PathContext& c, PathIdentities& out) {
    const ModelSpec& m = c.model;
    const WeightPath& path = c.path;
    const Mat& p = path.points();
    const TimeGrid& g = c.grid;
    const auto limit = static_cast<Eigen::Index>(c.limit());
    const double tau = path.hitting().time;
    const bool hit = path.hitting().hit();
    double dev = 0.0;

    if (name == "sum_to_one") {
        for (Eigen::Index k = 0; k < p.rows(); ++k) dev = std::max(dev, std::abs(p.row(k).sum() - 1.0));
    } else if (name == "excess_growth_dominance") {
        const GammaPath gH = gamma_G(*make_entropy(), path, c.cov());
        dev = excess_dominance_check(gH, c.gammaQ()).max_violation;
    } else if (name == "r_exponential") {
        const double r0 = radial_r(m.x0);
        for (double t : {0.5, 1.0, 2.0, g.horizon()}) {
            if (t > g.horizon() + 1e-9 * g.dt) continue;
            const auto k = static_cast<Eigen::Index>(g.index_at(t + 1e-9 * g.dt));
            if (k >= limit) continue;
            const double r = radial_at(p, k);
            dev = std::max(dev, std::abs(r / (r0 * std::exp(g.time(static_cast<std::size_t>(k)))) - 1.0));
        }
    } else if (name == "sum_squares_circle") {
        const WeightPath& o = c.oracle();
        const double r0 = radial_r(m.x0);
        const auto lim = static_cast<Eigen::Index>(o.stop_index().value_or(o.n_points()));
        for (Eigen::Index k = 0; k < lim; ++k)
            dev = std::max(dev, std::abs(sum_squares(o.points(), k) -
                                         (1.0 / 3.0 + r0 * std::exp(g.time(static_cast<std::size_t>(k))))));
    } else if (name == "hitting_time_lower_bound") {
        if (hit) dev = std::max(0.0, expanding_circle_tstar(m.x0) - tau);
    } else if (name == "r_linear") {
        const double r0 = m.params.at("r0");
        for (Eigen::Index k = 0; k < limit; ++k)
            dev = std::max(dev, std::abs(radial_at(p, k) - (r0 + g.time(static_cast<std::size_t>(k)))));
    } else if (name == "gammaQ_equals_t" || name == "gammaG_equals_t") {
        const GammaPath gp = name == "gammaQ_equals_t" ? c.gammaQ() : gamma_G(*m.flow_G, path, c.cov());
        for (Eigen::Index k = 0; k < limit; ++k)
            dev = std::max(dev, std::abs(gp.values[k] - (g.time(static_cast<std::size_t>(k)) - g.t0)));
    } else if (name == "stop_lower_bound") {
        const double Q0 = 1.0 - m.x0.squaredNorm();
        if (hit) dev = std::max(0.0, (Q0 - 0.5) - tau);
    } else if (name == "sum_squares_spiral") {
        const double delta = m.params.at("delta"), tstar = m.params.at("tstar");
        const Vec psi = spiral_psi(delta, g, c.dW, c.cfg.scheme);
        for (Eigen::Index k = 0; k < p.rows(); ++k) {
            const double phi = 2.0 * delta + psi[k];
            const double t = std::min(g.time(static_cast<std::size_t>(k)), tstar);
            dev = std::max(dev, std::abs(sum_squares(p, k) - (1.0 / 3.0 + 1.5 * phi * phi * std::exp(t))));
        }
    } else if (name == "gammaQ_slope") {
        const double eta = radial_r(m.x0) / 4.0;
        const GammaPath& gq = c.gammaQ();
        for (Eigen::Index k = 0; k + 1 < limit; ++k)
            dev = std::max(dev, eta - gq.increment(static_cast<std::size_t>(k)) / g.dt);
    } else if (name == "alpha_rank_two") {
        const AlphaPath a = alpha_decompose(c.cov());
        std::size_t bad = 0, counted = 0;
        for (Eigen::Index k = 0; k + 1 < limit; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (a.degenerate[ks]) continue;
            const double l2 = eigen_sym3(Eigen::Matrix3d(a.alpha[ks]))[1];
            out.min_lambda2 = std::min(out.min_lambda2, l2);
            ++counted;
            bad += !(l2 > 0.0);
        }
        dev = counted ? static_cast<double>(bad) / static_cast<double>(counted) : 0.0;
    } else if (name == "sum_squares_constant") {
        const WeightPath& o = c.oracle();
        const double target = 1.0 / 3.0 + 1.5 * m.params.at("delta") * m.params.at("delta");
        for (Eigen::Index k = 0; k < o.points().rows(); ++k)
            dev = std::max(dev, std::abs(sum_squares(o.points(), k) - target));
    } else if (name == "qstar_wealth" || name == "qstar_wealth_realized") {
        const WeightPath& o = c.oracle();
        const double delta = m.params.at("delta");
        const double Q0 = 1.0 - m.x0.squaredNorm();
        const double slope = 1.5 * delta * delta / Q0;
        const CovariationPath cov = name == "qstar_wealth" ? analytic_cov(o, m.rate_fn()) : realized_cov(o);
        const Generated gen = additive_generate(*make_normalized(make_quadratic(), m.x0), o, cov);
        for (Eigen::Index k = 0; k < gen.wealth.values.size(); ++k)
            dev = std::max(dev, std::abs(gen.wealth.values[k] - (1.0 + slope * (g.time(static_cast<std::size_t>(k)) - g.t0))));
        if (name == "qstar_wealth") {
            // Growth statistic from the self-financing wealth on the simulated path.
            const Generated sim = additive_generate(*make_normalized(make_quadratic(), m.x0), path, c.cov());
            const WealthPath v = wealth_selffinancing(sim.strategy, path);
            out.growth = (v.final() - 1.0) / (g.horizon() - g.t0);
        }
    } else if (name == "G_decreases_linearly") {
        const double G0 = m.params.at("G0");
        for (Eigen::Index k = 0; k < limit; ++k)
            dev = std::max(dev, std::abs(m.flow_G->value(p.row(k).transpose()) - (G0 - g.time(static_cast<std::size_t>(k)))));
    } else if (name == "exit_time_bounds") {
        const double G0 = m.params.at("G0");
        if (hit) dev = std::max({0.0, (G0 - m.gfrak) - tau, tau - G0});
        else dev = std::max(0.0, g.horizon() - G0);
    } else if (name == "alpha_eigenvalues_01") {
        const AlphaPath a = alpha_decompose(c.cov());
        for (Eigen::Index k = 0; k + 1 < limit; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (a.degenerate[ks]) continue;
            const Mat& al = a.alpha[ks];
            const double mid = 0.5 * (al(0, 0) + al(1, 1));
            const double rad = std::hypot(0.5 * (al(0, 0) - al(1, 1)), al(0, 1));
            dev = std::max({dev, std::abs(mid - rad), std::abs(mid + rad - 1.0)});
        }
    } else if (name == "fold_range") {
        const double a = m.params.at("lower"), b = m.params.at("upper");
        for (Eigen::Index k = 0; k < p.rows(); ++k) dev = std::max({dev, a - p(k, 0), p(k, 0) - b});
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown identity '" + name + "'");
    }
    return dev;
}

}  // namespace

IdentityReport identity_suite(const ModelSpec& model, const SimConfig& cfg) {
    cfg.validate();
    const std::vector<std::string>& names = model.identities;
    const auto per_path = map_paths(model, cfg, [&](std::size_t, const WeightPath& path, const Mat& dW) {
        PathIdentities out;
        PathContext ctx(model, cfg, path, dW);
        for (const auto& name : names) out.dev.push_back(check_identity(name, ctx, out));
        out.final = path.point(path.n_points() - 1);
        out.hit = path.hitting().hit() && path.hitting().rule.rfind("exit_simplex", 0) == 0;
        out.hit_time = path.hitting().time;
        return out;
    });

    IdentityReport rep;
    const double dt = cfg.dt;
    for (std::size_t j = 0; j < names.size(); ++j) {
        IdentityCheck c{names[j], 0.0, tolerance_for(names[j], dt), true};
        for (const auto& pi : per_path) {
            if (std::isnan(pi.dev[j])) c.max_dev = std::numeric_limits<double>::quiet_NaN();
            if (!std::isnan(c.max_dev)) c.max_dev = std::max(c.max_dev, pi.dev[j]);
        }
        c.pass = c.max_dev <= c.tol;  // false for NaN
        rep.checks.push_back(c);
    }

    std::vector<Vec> finals;
    std::vector<double> exits, growth;
    double min_l2 = std::numeric_limits<double>::infinity();
    for (const auto& pi : per_path) {
        finals.push_back(pi.final);
        min_l2 = std::min(min_l2, pi.min_lambda2);
        growth.push_back(pi.growth);
        if (pi.hit) exits.push_back(pi.hit_time);
    }
    rep.hitting = hitting_stats(exits);
    if (std::isfinite(min_l2)) rep.extras.emplace_back("min_alpha_lambda2", min_l2);

    if (per_path.size() >= kMartingaleMinPaths) {
        MartingaleReport mr = martingale_mean_test(finals, model.x0);
        const bool qstar = std::find(names.begin(), names.end(), "qstar_wealth") != names.end();
        if (qstar) {
            const double delta = model.params.at("delta");
            mr.growth = growth_statistic(growth, 1.5 * delta * delta / (1.0 - model.x0.squaredNorm()));
        }
        if (model.martingale) rep.checks.push_back({"martingale_mean", mr.max_abs_z, kMartingaleZ, mr.pass});
        rep.martingale = std::move(mr);
    }
    return rep;
}

}  // namespace spt
