#pragma once

#include "spt/arbitrage.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace spt {

/// One experiment, read from a flat `key = value` text file. Lines starting with # are
/// comments; the value is everything after the first '=' with surrounding blanks removed.
///
///   model           zoo id with parameters, e.g. lyapunov_flow:G=geom_mean,mu0=[0.5,0.3,0.2]
///   seed            unsigned 64-bit integer (required)
///   dt, T           step and horizon in years (T defaults per model)
///   n_paths         number of paths (default 100)
///   threads         worker threads (default 1); never changes results
///   scheme          milstein | euler (default milstein)
///   refine          true | false, Brownian-bridge step splitting (default true)
///   boundary_epsilon  exit level (default 0)
///   strategy        market | additive | multiplicative | one_asset | switching
///   G               generator id for the strategy, e.g. quadratic|normalize
///   eta, h          strategy constants
///   cov             analytic | realized covariation inside strategies (default analytic)
///   out             output directory (default .)
struct ExperimentConfig {
    std::string model;
    SimConfig sim;
    bool T_given = false;
    std::optional<std::uint64_t> seed;
    StrategySpec strategy;
    bool realized_cov = false;
    std::string out = ".";

    /// Throws ConfigError naming the key.
    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig load(const std::string& file);

    /// Set one key as if it appeared in the file (later settings win).
    void set(const std::string& key, const std::string& value);

    /// Model, seed and simulation settings resolved; T filled from the model when not given.
    ModelSpec resolve_model();
    void require_seed() const;
};

}  // namespace spt
