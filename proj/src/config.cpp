#include "spt/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>

namespace spt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::ConfigError, key + ": " + why);
}

double as_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, "expected a number, got '" + v + "'");
    return x;
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
        bad(key, "expected an unsigned integer, got '" + v + "'");
    return x;
}

bool as_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "model") model = value;
    else if (key == "seed") seed = as_u64(key, value);
    else if (key == "dt") sim.dt = as_double(key, value);
    else if (key == "T") sim.T = as_double(key, value), T_given = true;
    else if (key == "n_paths") sim.n_paths = as_u64(key, value);
    else if (key == "threads") {
        const auto t = as_u64(key, value);
        if (t < 1 || t > 1024) bad(key, "must lie in [1, 1024]");
        sim.threads = static_cast<unsigned>(t);
    } else if (key == "scheme") {
        if (value == "milstein") sim.scheme = Scheme::Milstein;
        else if (value == "euler" || value == "euler_maruyama") sim.scheme = Scheme::EulerMaruyama;
        else bad(key, "expected milstein or euler, got '" + value + "'");
    } else if (key == "refine") sim.refine = as_bool(key, value);
    else if (key == "boundary_epsilon") sim.boundary_epsilon = as_double(key, value);
    else if (key == "strategy") {
        static const std::set<std::string> kinds = {"market", "additive", "multiplicative", "one_asset", "switching"};
        if (!kinds.count(value)) bad(key, "unknown strategy '" + value + "'");
        strategy.kind = value;
    } else if (key == "G") {
        try {
            GenSpec::parse(value);
        } catch (const Error& e) {
            bad(key, e.what());
        }
        strategy.G = value;
    } else if (key == "eta") strategy.eta = as_double(key, value);
    else if (key == "h") strategy.h = as_double(key, value);
    else if (key == "cov") {
        if (value != "analytic" && value != "realized") bad(key, "expected analytic or realized");
        realized_cov = value == "realized";
    } else if (key == "out") {
        if (value.empty()) bad(key, "must not be empty");
        out = value;
    } else {
        bad(key, "unknown key");
    }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) bad("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        if (!seen.insert(key).second) bad(key, "given twice");
        cfg.set(key, trim(s.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::IOError, "cannot open " + file);
    return parse(in);
}

void ExperimentConfig::require_seed() const {
    if (!seed) throw Error(ErrorCode::ConfigError, "seed: required");
}

ModelSpec ExperimentConfig::resolve_model() {
    if (model.empty()) throw Error(ErrorCode::ConfigError, "model: required");
    require_seed();
    ModelSpec spec = parse_model(model);
    sim.seed = *seed;
    if (!(sim.dt > 0.0)) bad("dt", "must be positive");
    if (!T_given) sim.T = default_horizon(spec, sim.dt);
    sim.validate();
    return spec;
}

}  // namespace spt
