#include "spt/rng.hpp"

#include <cmath>
#include <numbers>

namespace spt {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

// 53-bit uniform in (0, 1).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
        mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t path, std::uint32_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, path_(path), stream_(stream) {}

std::array<double, 2> GaussianStream::normal_pair(std::uint64_t step, std::uint32_t lane) const noexcept {
    // Counter words: step, (stream, lane), path lo, path hi.
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(step),
                                  (stream_ << 16) ^ (lane & 0xFFFFu) ^ (static_cast<std::uint32_t>(step >> 32) << 24),
                                  static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)};
    const auto out = Philox4x32::block(ctr, key_);
    const double u1 = to_unit(out[0], out[1]);
    const double u2 = to_unit(out[2], out[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

Mat brownian_increments(std::uint64_t seed, std::uint64_t path, std::size_t n_steps, std::size_t m, double dt,
                        std::uint32_t stream) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    const GaussianStream gauss(seed, path, stream);
    const double scale = std::sqrt(dt);
    Mat dW(static_cast<Eigen::Index>(n_steps), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < n_steps; ++k) {
        for (std::size_t j = 0; j < m; j += 2) {
            const auto z = gauss.normal_pair(k, static_cast<std::uint32_t>(j / 2));
            dW(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = scale * z[0];
            if (j + 1 < m) dW(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j + 1)) = scale * z[1];
        }
    }
    return dW;
}

Mat coarsen_increments(const Mat& dW, std::size_t factor) {
    if (factor == 0 || dW.rows() % static_cast<Eigen::Index>(factor) != 0)
        throw Error(ErrorCode::InvalidArgument, "coarsening factor must divide the number of steps");
    const auto f = static_cast<Eigen::Index>(factor);
    Mat out = Mat::Zero(dW.rows() / f, dW.cols());
    for (Eigen::Index k = 0; k < dW.rows(); ++k) out.row(k / f) += dW.row(k);
    return out;
}

}  // namespace spt
