#pragma once

#include "spt/models.hpp"
#include "spt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <thread>
#include <vector>

namespace spt {

struct SimConfig {
    double dt = 1e-4;
    double T = 1.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    double boundary_epsilon = 0.0;
    Scheme scheme = Scheme::Milstein;
    unsigned threads = 1;
    bool refine = true;  // Brownian-bridge step splitting near fast moves and exits

    void validate() const;
    TimeGrid grid() const { return TimeGrid::covering(T, dt); }
};

struct StopRule {
    enum class Kind { ExitSimplex, MinWeightBelow, Mu1Halved, Horizon };
    Kind kind = Kind::ExitSimplex;
    double level = 0.0;  // epsilon, 1/n, mu1(0)/2 or the horizon time

    static StopRule exit_simplex(double eps = 0.0) { return {Kind::ExitSimplex, eps}; }
    static StopRule min_weight_below(int n) { return {Kind::MinWeightBelow, 1.0 / n}; }
    static StopRule mu1_halved(double mu1_0) { return {Kind::Mu1Halved, 0.5 * mu1_0}; }
    static StopRule horizon(double T) { return {Kind::Horizon, T}; }
    std::string label() const;
};

/// Applies the rule to raw grid points in place and freezes everything after the stop.
/// Exit rule: the stopped point is the linear interpolation to the crossing, with the
/// crossing coordinate set to the level. Other rules freeze at the triggering grid point.
/// The refined time interpolates the triggering coordinate (Horizon: the rule time).
HittingRecord apply_stop(Mat& points, const TimeGrid& grid, const StopRule& rule);

/// Stop an existing path. A path already stopped keeps its earlier stop if that comes first.
WeightPath boundary_stop(const WeightPath& path, const StopRule& rule);

/// Driver increments for one path: n_steps x m, keyed by (seed, path).
Mat path_noise(const ModelSpec& spec, const TimeGrid& grid, std::uint64_t seed, std::uint64_t path);

/// Key for the Brownian-bridge midpoints used when a step is split. A step is halved
/// (recursively, up to max_depth) when it moves some weight by more than theta of its
/// value or leaves the simplex; exits are then located on the finest substep.
struct Refinement {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    double theta = 0.1;
    int max_depth = 12;
};

/// Integrate the SDE (or the driver closed form) on given increments, stopping at the boundary
/// (level eps) and at the model's horizon cap. Without a refinement key every step is a plain
/// scheme step on the grid.
WeightPath simulate_with_noise(const ModelSpec& spec, const TimeGrid& grid, const Mat& dW,
                               Scheme scheme = Scheme::Milstein, double eps = 0.0,
                               const Refinement* ref = nullptr);

/// Exact-oracle path on given increments, stopped the same way. Throws if the model has none.
WeightPath exact_with_noise(const ModelSpec& spec, const TimeGrid& grid, const Mat& dW, double eps = 0.0);

struct PathSample {
    WeightPath path;
    Mat dW;
};
PathSample simulate_path(const ModelSpec& spec, const SimConfig& cfg, std::size_t index);

struct Ensemble {
    SimConfig cfg;
    std::vector<WeightPath> paths;
    std::vector<Mat> noise;
};
/// Whole ensemble in memory; use map_paths for large runs.
Ensemble simulate_em(const ModelSpec& spec, const SimConfig& cfg);

/// Evaluate f(i) for i in [0, n) on up to `threads` workers; results in index order,
/// so the output does not depend on the thread count.
template <class F>
auto parallel_map(std::size_t n, unsigned threads, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<R> out(n);
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

/// Simulate each path and reduce it to a summary without keeping the ensemble.
template <class F>
auto map_paths(const ModelSpec& spec, const SimConfig& cfg, F&& f) {
    cfg.validate();
    return parallel_map(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        PathSample s = simulate_path(spec, cfg, i);
        return f(i, s.path, s.dW);
    });
}

/// Neumaier-compensated sum.
class KahanSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

void write_ensemble_csv(std::ostream& os, const std::vector<WeightPath>& paths);

}  // namespace spt
