#include "spt/engine.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <sstream>

namespace spt {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "dt: must be positive");
    if (!(T >= dt)) throw Error(ErrorCode::ConfigError, "T: must be at least dt");
    if (n_paths < 1) throw Error(ErrorCode::ConfigError, "n_paths: must be at least 1");
    if (!(boundary_epsilon >= 0.0)) throw Error(ErrorCode::ConfigError, "boundary_epsilon: must be nonnegative");
    const double steps = T / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw Error(ErrorCode::ConfigError, "T: must be a multiple of dt");
}

std::string StopRule::label() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::ExitSimplex: os << "exit_simplex"; break;
        case Kind::MinWeightBelow: os << "min_weight_below:" << level; break;
        case Kind::Mu1Halved: os << "mu1_halved:" << level; break;
        case Kind::Horizon: os << "horizon:" << level; break;
    }
    return os.str();
}

namespace {

bool triggers(const StopRule& rule, const Mat& p, Eigen::Index k, const TimeGrid& grid) {
    switch (rule.kind) {
        case StopRule::Kind::ExitSimplex: return p.row(k).minCoeff() <= rule.level;
        case StopRule::Kind::MinWeightBelow: return p.row(k).minCoeff() < rule.level;
        case StopRule::Kind::Mu1Halved: return p(k, 0) <= rule.level;
        case StopRule::Kind::Horizon: return grid.time(static_cast<std::size_t>(k)) >= rule.level - 1e-9 * grid.dt;
    }
    return false;
}

// Fraction of the step [k-1, k] at which coordinate j reaches level.
double crossing_fraction(const Mat& p, Eigen::Index k, Eigen::Index j, double level) {
    const double a = p(k - 1, j), b = p(k, j);
    if (!(a != b)) return 1.0;
    return std::clamp((a - level) / (a - b), 0.0, 1.0);
}

}  // namespace

HittingRecord apply_stop(Mat& p, const TimeGrid& grid, const StopRule& rule) {
    HittingRecord rec;
    Eigen::Index k = 0;
    while (k < p.rows() && !triggers(rule, p, k, grid)) ++k;
    if (k == p.rows()) return rec;
    rec.stop_index = static_cast<std::size_t>(k);
    rec.rule = rule.label();

    if (rule.kind == StopRule::Kind::Horizon) {
        rec.time = std::max(rule.level, grid.t0);
    } else if (k == 0) {
        Eigen::Index j = 0;
        if (rule.kind == StopRule::Kind::Mu1Halved) j = 0;
        else p.row(0).minCoeff(&j);
        rec.coordinate = static_cast<int>(j);
        rec.time = grid.t0;
    } else if (rule.kind == StopRule::Kind::ExitSimplex) {
        double lambda = 2.0;
        Eigen::Index jstar = 0;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (p(k, j) > rule.level) continue;
            const double f = crossing_fraction(p, k, j, rule.level);
            if (f < lambda) lambda = f, jstar = j;
        }
        Eigen::RowVectorXd hit = p.row(k - 1) + lambda * (p.row(k) - p.row(k - 1));
        hit[jstar] = rule.level;
        for (Eigen::Index j = 0; j < hit.size(); ++j)
            if (hit[j] < 0.0) hit[j] = 0.0;
        // Put the rounding residual of the sum on the largest weight.
        Eigen::Index big = 0;
        hit.maxCoeff(&big);
        hit[big] += 1.0 - hit.sum();
        p.row(k) = hit;
        rec.coordinate = static_cast<int>(jstar);
        rec.time = grid.time(static_cast<std::size_t>(k - 1)) + lambda * grid.dt;
    } else {
        Eigen::Index j = 0;
        if (rule.kind == StopRule::Kind::MinWeightBelow) p.row(k).minCoeff(&j);
        rec.coordinate = static_cast<int>(j);
        rec.time = grid.time(static_cast<std::size_t>(k - 1)) + crossing_fraction(p, k, j, rule.level) * grid.dt;
    }
    for (Eigen::Index r = k + 1; r < p.rows(); ++r) p.row(r) = p.row(k);
    return rec;
}

WeightPath boundary_stop(const WeightPath& path, const StopRule& rule) {
    Mat p = path.points();
    HittingRecord rec = apply_stop(p, path.grid(), rule);
    const auto& old = path.stop_index();
    if (old && (!rec.hit() || *old <= *rec.stop_index)) return path;
    return WeightPath(path.grid(), std::move(p), std::move(rec));
}

Mat path_noise(const ModelSpec& spec, const TimeGrid& grid, std::uint64_t seed, std::uint64_t path) {
    return brownian_increments(seed, path, grid.n_steps, static_cast<std::size_t>(spec.m), grid.dt);
}

namespace {

HittingRecord stop_model(Mat& p, const ModelSpec& spec, const TimeGrid& grid, double eps) {
    HittingRecord rec = apply_stop(p, grid, StopRule::exit_simplex(eps));
    if (!rec.hit() && std::isfinite(spec.horizon_cap)) rec = apply_stop(p, grid, StopRule::horizon(spec.horizon_cap));
    return rec;
}

// Central difference of b along b; the step keeps both probes inside the simplex.
void milstein_fd(const ModelSpec& spec, double t, const double* x, const double* b, double* out) {
    const int d = spec.d;
    double bmax = 0.0, xmin = 1.0;
    for (int i = 0; i < d; ++i) bmax = std::max(bmax, std::abs(b[i])), xmin = std::min(xmin, x[i]);
    if (!(bmax > 0.0)) {
        for (int i = 0; i < d; ++i) out[i] = 0.0;
        return;
    }
    const double h = std::min(1e-6, 0.5 * xmin / bmax);
    std::array<double, 8> xp{}, xm{}, bp{}, bm{};
    for (int i = 0; i < d; ++i) xp[i] = x[i] + h * b[i], xm[i] = x[i] - h * b[i];
    spec.diffusion(t, xp.data(), bp.data());
    spec.diffusion(t, xm.data(), bm.data());
    double mean = 0.0;
    for (int i = 0; i < d; ++i) out[i] = (bp[i] - bm[i]) / (2.0 * h), mean += out[i];
    // (Db) b sums to zero exactly; remove the cancellation error of the difference quotient.
    mean /= d;
    for (int i = 0; i < d; ++i) out[i] -= mean;
}

void check_fields(const ModelSpec& spec, const double* a, const double* b) {
    const int d = spec.d;
    double asum = 0.0, scale = 1.0;
    for (int i = 0; i < d; ++i) asum += a[i], scale += std::abs(a[i]);
    if (std::abs(asum) > 1e-12 * scale) throw Error(ErrorCode::SpecViolation, spec.name + ": drift does not sum to 0");
    for (int j = 0; j < spec.m; ++j) {
        double s = 0.0, sc = 1.0;
        for (int i = 0; i < d; ++i) s += b[j * d + i], sc += std::abs(b[j * d + i]);
        if (std::abs(s) > 1e-12 * sc)
            throw Error(ErrorCode::SpecViolation, spec.name + ": diffusion column does not sum to 0");
    }
}

// One scheme step per call; steps that move a weight by more than theta of its value, or
// leave the simplex, are split at a Brownian-bridge midpoint drawn from a separate stream.
class Stepper {
public:
    Stepper(const ModelSpec& spec, Scheme scheme, double eps, const Refinement* ref)
        : spec_(spec), eps_(eps), ref_(ref), milstein_(scheme == Scheme::Milstein && spec.m == 1) {
        if (ref_) bridge_.emplace(ref_->seed, ref_->path, 1);
    }

    // Advances x over [t, t + h]; on exit returns true with the crossing point and time.
    bool run(double* x, double t, double h, const double* dw, std::uint64_t step, std::uint64_t node, int depth,
             double& t_hit) {
        std::array<double, 8> cand{};
        const double move = advance(x, t, h, dw, cand.data());
        double mn = 1.0;
        for (int i = 0; i < spec_.d; ++i) mn = std::min(mn, cand[i]);
        const bool cross = mn <= eps_;
        if (ref_ && depth < ref_->max_depth && (move > ref_->theta || cross)) {
            std::array<double, 8> w1{}, w2{};
            const double half = 0.5 * std::sqrt(h);
            for (int j = 0; j < spec_.m; ++j) {
                const double z = bridge_->normal_pair((step << 20) | node, static_cast<std::uint32_t>(j / 2))[j % 2];
                w1[j] = 0.5 * dw[j] + half * z;
                w2[j] = dw[j] - w1[j];
            }
            if (run(x, t, 0.5 * h, w1.data(), step, 2 * node, depth + 1, t_hit)) return true;
            return run(x, t + 0.5 * h, 0.5 * h, w2.data(), step, 2 * node + 1, depth + 1, t_hit);
        }
        if (cross) {
            double lambda = 2.0;
            int jstar = 0;
            for (int i = 0; i < spec_.d; ++i) {
                if (cand[i] > eps_) continue;
                const double f = x[i] != cand[i] ? std::clamp((x[i] - eps_) / (x[i] - cand[i]), 0.0, 1.0) : 1.0;
                if (f < lambda) lambda = f, jstar = i;
            }
            double sum = 0.0;
            int big = 0;
            for (int i = 0; i < spec_.d; ++i) {
                x[i] = i == jstar ? eps_ : std::max(0.0, x[i] + lambda * (cand[i] - x[i]));
                sum += x[i];
                if (x[i] > x[big]) big = i;
            }
            x[big] += 1.0 - sum;
            t_hit = t + lambda * h;
            hit_coordinate = jstar;
            return true;
        }
        for (int i = 0; i < spec_.d; ++i) x[i] = cand[i];
        return false;
    }

    int hit_coordinate = -1;

private:
    // Scheme increment; returns the largest relative move max |dx_i| / x_i.
    double advance(const double* x, double t, double h, const double* dw, double* out) {
        const int d = spec_.d, m = spec_.m;
        std::array<double, 8> a{}, corr{};
        std::array<double, 16> b{};
        spec_.diffusion(t, x, b.data());
        if (spec_.drift) spec_.drift(t, x, a.data());
        check_fields(spec_, a.data(), b.data());
        if (milstein_) {
            if (spec_.milstein) spec_.milstein(t, x, corr.data());
            else milstein_fd(spec_, t, x, b.data(), corr.data());
        }
        const double lev = 0.5 * (dw[0] * dw[0] - h);
        double move = 0.0;
        for (int i = 0; i < d; ++i) {
            double v = x[i] + a[i] * h;
            for (int j = 0; j < m; ++j) v += b[j * d + i] * dw[j];
            if (milstein_) v += corr[i] * lev;
            out[i] = v;
            move = std::max(move, std::abs(v - x[i]) / std::max(x[i], 1e-300));
        }
        return move;
    }

    const ModelSpec& spec_;
    double eps_;
    const Refinement* ref_;
    bool milstein_;
    std::optional<GaussianStream> bridge_;
};

struct Integrated {
    Mat points;
    HittingRecord hit;
};

Integrated integrate_sde(const ModelSpec& spec, const TimeGrid& grid, const Mat& dW, Scheme scheme, double eps,
                         const Refinement* ref) {
    const int d = spec.d, m = spec.m;
    if (d > 8 || m > 8 || d * m > 16) throw Error(ErrorCode::InvalidArgument, "engine supports d <= 8 and d * m <= 16");
    if (ref && grid.n_steps >= (std::size_t{1} << 20))
        throw Error(ErrorCode::InvalidArgument, "step refinement supports fewer than 2^20 steps");
    const auto n = static_cast<Eigen::Index>(grid.n_steps);
    Integrated out{Mat(n + 1, d), {}};
    Mat& p = out.points;
    std::array<double, 8> x{}, dw{};
    for (int i = 0; i < d; ++i) x[i] = spec.x0[i];
    p.row(0) = spec.x0.transpose();
    Stepper stepper(spec, scheme, eps, ref);
    Eigen::Index k = 0;
    for (; k < n; ++k) {
        const double t = grid.time(static_cast<std::size_t>(k));
        if (t >= spec.horizon_cap - 1e-9 * grid.dt) break;
        for (int j = 0; j < m; ++j) dw[j] = dW(k, j);
        double t_hit = 0.0;
        const bool crossed = stepper.run(x.data(), t, grid.dt, dw.data(), static_cast<std::uint64_t>(k), 1, 0, t_hit);
        for (int i = 0; i < d; ++i) p(k + 1, i) = x[i];
        if (crossed) {
            ++k;
            out.hit.stop_index = static_cast<std::size_t>(k);
            out.hit.time = t_hit;
            out.hit.coordinate = stepper.hit_coordinate;
            out.hit.rule = StopRule::exit_simplex(eps).label();
            break;
        }
    }
    for (Eigen::Index r = k + 1; r <= n; ++r) p.row(r) = p.row(k);
    return out;
}

}  // namespace

WeightPath simulate_with_noise(const ModelSpec& spec, const TimeGrid& grid, const Mat& dW, Scheme scheme, double eps,
                               const Refinement* ref) {
    if (static_cast<std::size_t>(dW.rows()) != grid.n_steps || dW.cols() != spec.m)
        throw Error(ErrorCode::GridMismatch, "Brownian increments do not match the grid and driver count");
    if (spec.driver_sim) {
        Mat p = spec.driver_sim(grid, dW, scheme);
        HittingRecord rec = stop_model(p, spec, grid, eps);
        return WeightPath(grid, std::move(p), std::move(rec));
    }
    Integrated r = integrate_sde(spec, grid, dW, scheme, eps, ref);
    if (!r.hit.hit()) r.hit = stop_model(r.points, spec, grid, eps);
    return WeightPath(grid, std::move(r.points), std::move(r.hit));
}

WeightPath exact_with_noise(const ModelSpec& spec, const TimeGrid& grid, const Mat& dW, double eps) {
    if (!spec.exact) throw Error(ErrorCode::InvalidArgument, spec.name + " has no exact solution oracle");
    if (static_cast<std::size_t>(dW.rows()) != grid.n_steps || dW.cols() != spec.m)
        throw Error(ErrorCode::GridMismatch, "Brownian increments do not match the grid and driver count");
    Mat p = spec.exact(grid, dW);
    HittingRecord rec = stop_model(p, spec, grid, eps);
    return WeightPath(grid, std::move(p), std::move(rec));
}

PathSample simulate_path(const ModelSpec& spec, const SimConfig& cfg, std::size_t index) {
    const TimeGrid grid = cfg.grid();
    Mat dW = path_noise(spec, grid, cfg.seed, index);
    const Refinement ref{cfg.seed, index};
    WeightPath path = simulate_with_noise(spec, grid, dW, cfg.scheme, cfg.boundary_epsilon, cfg.refine ? &ref : nullptr);
    return {std::move(path), std::move(dW)};
}

Ensemble simulate_em(const ModelSpec& spec, const SimConfig& cfg) {
    cfg.validate();
    auto samples = parallel_map(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        return std::optional<PathSample>(simulate_path(spec, cfg, i));
    });
    Ensemble e;
    e.cfg = cfg;
    e.paths.reserve(samples.size());
    e.noise.reserve(samples.size());
    for (auto& s : samples) {
        e.paths.push_back(std::move(s->path));
        e.noise.push_back(std::move(s->dW));
    }
    return e;
}

void write_ensemble_csv(std::ostream& os, const std::vector<WeightPath>& paths) {
    const std::size_t d = paths.empty() ? 3 : paths.front().dim();
    os << "t,path_id";
    for (std::size_t i = 1; i <= d; ++i) os << ",mu" << i;
    os << '\n';
    os.precision(17);
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const WeightPath& w = paths[p];
        for (std::size_t k = 0; k < w.n_points(); ++k) {
            os << w.grid().time(k) << ',' << p;
            for (std::size_t i = 0; i < d; ++i) os << ',' << w.weight(k, i);
            os << '\n';
        }
    }
}

}  // namespace spt
