#pragma once

#include "spt/error.hpp"

#include <array>
#include <cstddef>
#include <cstdint>

namespace spt {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A block is a pure function of (counter, key); there is no hidden state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Deterministic Gaussian stream keyed by (seed, path, stream).
/// normal_pair(step, lane) returns two independent N(0,1) draws.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t path, std::uint32_t stream = 0) noexcept;

    std::array<double, 2> normal_pair(std::uint64_t step, std::uint32_t lane) const noexcept;

private:
    Philox4x32::Key key_;
    std::uint64_t path_;
    std::uint32_t stream_;
};

/// n_steps x m matrix of Brownian increments with variance dt, entry (k, j) for step k and driver j.
/// Row k depends only on (seed, path, k), so prefixes agree across horizons.
Mat brownian_increments(std::uint64_t seed, std::uint64_t path, std::size_t n_steps, std::size_t m, double dt,
                        std::uint32_t stream = 0);

/// Sum consecutive groups of `factor` rows (the same Brownian path on a coarser grid).
Mat coarsen_increments(const Mat& dW, std::size_t factor);

}  // namespace spt
