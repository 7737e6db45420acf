#pragma once

#include "spt/error.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>

namespace spt {

/// Absolute tolerance on the weight sum. Entries are never renormalized.
inline constexpr double kSimplexTol = 1e-12;

/// A validated point of the unit simplex: nonnegative weights summing to one.
class SimplexPoint {
public:
    static SimplexPoint validate(std::span<const double> x);
    static SimplexPoint validate(const Vec& x) { return validate(std::span<const double>(x.data(), x.size())); }

    const Vec& weights() const noexcept { return w_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(w_.size()); }
    double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }
    bool interior() const noexcept { return w_.minCoeff() > 0.0; }

private:
    explicit SimplexPoint(Vec w) : w_(std::move(w)) {}
    Vec w_;
};

/// Throws NegativeWeight or SumNotOne; d must be at least 2.
SimplexPoint validate_simplex(std::span<const double> x);

/// Uniform time grid t_k = t0 + k dt, k = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n_steps = 0;

    static TimeGrid make(double t0, double dt, std::size_t n_steps);
    /// Grid on [0, T] with n_steps = round(T / dt); T must be a multiple of dt to 1e-9 relative.
    static TimeGrid covering(double T, double dt);

    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
    double horizon() const noexcept { return time(n_steps); }
    std::size_t n_points() const noexcept { return n_steps + 1; }
    /// Largest k with t_k <= t (clamped to the grid).
    std::size_t index_at(double t) const noexcept;

    bool same_as(const TimeGrid& other) const noexcept;
};

/// Where and when a path was stopped.
struct HittingRecord {
    std::optional<std::size_t> stop_index;
    double time = std::numeric_limits<double>::infinity();  // refined by interpolation
    int coordinate = -1;
    std::string rule;

    bool hit() const noexcept { return stop_index.has_value(); }
};

/// Market-weight path on a uniform grid; rows of points() are times.
/// Frozen (constant) from stop_index onward when the path was absorbed or stopped.
class WeightPath {
public:
    WeightPath(TimeGrid grid, Mat points, HittingRecord hit = {});

    const TimeGrid& grid() const noexcept { return grid_; }
    const Mat& points() const noexcept { return points_; }
    Vec point(std::size_t k) const { return points_.row(static_cast<Eigen::Index>(k)).transpose(); }
    double weight(std::size_t k, std::size_t i) const {
        return points_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
    }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    std::size_t n_points() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    const HittingRecord& hitting() const noexcept { return hit_; }
    const std::optional<std::size_t>& stop_index() const noexcept { return hit_.stop_index; }
    /// Number of leading grid points at which the path is strictly inside the simplex.
    std::size_t interior_prefix() const noexcept;

private:
    TimeGrid grid_;
    Mat points_;
    HittingRecord hit_;
};

/// Capitalizations S_i(t_k) > 0 on a uniform grid.
class CapPath {
public:
    CapPath(TimeGrid grid, Mat caps);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Mat& caps() const noexcept { return caps_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(caps_.cols()); }

private:
    TimeGrid grid_;
    Mat caps_;
};

/// r(x) = (1/3)[(x1-x2)^2 + (x1-x3)^2 + (x2-x3)^2] for x on the hyperplane sum x = 1, d = 3.
double radial_r(std::span<const double> x);
inline double radial_r(const Vec& x) { return radial_r(std::span<const double>(x.data(), x.size())); }
/// The same quantity as sum (x_i - 1/3)^2.
double radial_r_centered(std::span<const double> x);
inline double radial_r_centered(const Vec& x) {
    return radial_r_centered(std::span<const double>(x.data(), x.size()));
}
/// Pairwise form without the hyperplane check; for inner loops.
inline double radial_r_unchecked(const double* x) noexcept {
    const double a = x[0] - x[1], b = x[0] - x[2], c = x[1] - x[2];
    return (a * a + b * b + c * c) / 3.0;
}

WeightPath weights_from_caps(const CapPath& caps);

}  // namespace spt
