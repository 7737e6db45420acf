#pragma once

#include "spt/simplex.hpp"

#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

namespace testing {

inline spt::Vec vec(std::initializer_list<double> xs) {
    spt::Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// Path from explicit rows on a grid with step dt starting at 0.
inline spt::WeightPath path_of(const std::vector<spt::Vec>& rows, double dt = 0.01) {
    spt::Mat p(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) p.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    return spt::WeightPath(spt::TimeGrid::make(0.0, dt, rows.size() - 1), p);
}

inline spt::WeightPath constant_path(const spt::Vec& x, std::size_t n_steps, double dt = 0.01) {
    return path_of(std::vector<spt::Vec>(n_steps + 1, x), dt);
}

// Uniform interior point of the 3-simplex with every weight at least lo.
inline spt::Vec random_interior(std::mt19937_64& rng, double lo = 0.05) {
    std::exponential_distribution<double> e(1.0);
    spt::Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = e(rng);
    x /= x.sum();
    x = lo + (1.0 - 3.0 * lo) * x.array();
    x[2] = 1.0 - x[0] - x[1];
    return x;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
