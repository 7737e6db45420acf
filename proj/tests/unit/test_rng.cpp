#include "helpers.hpp"

#include "spt/rng.hpp"

#include <cmath>

using namespace spt;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Reference outputs of the Random123 distribution (kat_vectors).
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Gaussian stream is a pure function of its key") {
    const GaussianStream a(42, 7), b(42, 7), c(42, 8), s1(42, 7, 1);
    CHECK(a.normal_pair(123, 0) == b.normal_pair(123, 0));
    CHECK(a.normal_pair(123, 0) != c.normal_pair(123, 0));
    CHECK(a.normal_pair(123, 0) != a.normal_pair(124, 0));
    CHECK(a.normal_pair(123, 0) != a.normal_pair(123, 1));
    CHECK(a.normal_pair(123, 0) != s1.normal_pair(123, 0));
}

TEST_CASE("Brownian increments: moments, prefixes, coarsening") {
    const double dt = 1e-3;
    const Mat dW = brownian_increments(5, 0, 200000, 2, dt);
    const double n = static_cast<double>(dW.size());
    const double mean = dW.sum() / n;
    const double var = dW.array().square().sum() / n;
    // Mean has standard error sqrt(dt / n); variance has relative standard error sqrt(2 / n).
    CHECK(std::abs(mean) < 4.0 * std::sqrt(dt / n));
    CHECK(std::abs(var / dt - 1.0) < 4.0 * std::sqrt(2.0 / n));
    const double corr = (dW.col(0).array() * dW.col(1).array()).sum() / (dW.rows() * dt);
    CHECK(std::abs(corr) < 4.0 / std::sqrt(double(dW.rows())));

    const Mat shorter = brownian_increments(5, 0, 1000, 2, dt);
    CHECK(shorter == dW.topRows(1000));

    const Mat coarse = coarsen_increments(shorter, 4);
    REQUIRE(coarse.rows() == 250);
    CHECK(std::abs(coarse(3, 1) - shorter.block(12, 1, 4, 1).sum()) < 1e-15);
}
