#include "spt/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace spt {

namespace {

bool is_exit(const HittingRecord& h) { return h.hit() && h.rule.rfind("exit_simplex", 0) == 0; }

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IOError, "cannot write " + path.string());
    return os;
}

void write_json(const std::string& dir, const std::string& name, const Json& j) {
    auto os = open_out(dir, name);
    os << j.dump(2) << '\n';
    if (!os) throw Error(ErrorCode::IOError, "write failed for " + name);
}

Json header(const ModelSpec& spec, const ExperimentConfig& cfg) {
    return Json{{"model", spec.id},
                {"T", cfg.sim.T},
                {"dt", cfg.sim.dt},
                {"n_paths", cfg.sim.n_paths},
                {"seed", cfg.sim.seed},
                {"scheme", std::string(to_string(cfg.sim.scheme))},
                {"refine", cfg.sim.refine}};
}

}  // namespace

void cmd_zoo_list(std::ostream& os) {
    for (const auto& name : zoo_names()) {
        const ModelSpec s = parse_model(name);
        os << std::left << std::setw(20) << name << s.anchor << '\n';
    }
}

void cmd_zoo_describe(const std::string& id, std::ostream& os) {
    const ModelSpec s = parse_model(id);
    os << "model: " << s.name << '\n' << "id: " << s.id << '\n';
    os << "dimension: " << s.d << ", drivers: " << s.m << '\n';
    os << "parameters:";
    for (const auto& [k, v] : s.params) os << ' ' << k << '=' << v;
    os << '\n' << "initial weights:";
    for (Eigen::Index i = 0; i < s.x0.size(); ++i) os << ' ' << s.x0[i];
    os << '\n' << "dynamics: " << s.summary << '\n';
    os << "about: " << s.anchor << '\n';
    os << "martingale weights: " << (s.martingale ? "yes" : "no") << '\n';
    os << "exact oracle: " << (s.exact ? "yes" : "no") << '\n';
    os << "identities:";
    for (const auto& n : s.identities) os << ' ' << n;
    os << '\n' << "deflator: " << s.deflator << '\n';
}

int cmd_simulate(ExperimentConfig cfg, std::ostream& log) {
    const ModelSpec spec = cfg.resolve_model();
    const Ensemble ens = simulate_em(spec, cfg.sim);
    {
        auto os = open_out(cfg.out, "ensemble.csv");
        write_ensemble_csv(os, ens.paths);
    }
    std::vector<double> exits;
    std::vector<Vec> finals;
    for (const auto& p : ens.paths) {
        if (is_exit(p.hitting())) exits.push_back(p.hitting().time);
        finals.push_back(p.point(p.n_points() - 1));
    }
    Json j = header(spec, cfg);
    j["hitting"] = to_json(hitting_stats(exits));
    if (finals.size() >= kMartingaleMinPaths) j["martingale"] = to_json(martingale_mean_test(finals, spec.x0));
    write_json(cfg.out, "simulate.json", j);
    log << "simulated " << ens.paths.size() << " paths of " << spec.id << "; " << exits.size() << " exits\n";
    return kExitOk;
}

int cmd_strategy(ExperimentConfig cfg, std::ostream& log) {
    const ModelSpec spec = cfg.resolve_model();
    const StrategyFn fn = make_strategy(cfg.strategy, spec, cfg.sim.T);
    const PathSample first = simulate_path(spec, cfg.sim, 0);
    const CovariationPath cov = cfg.realized_cov ? realized_cov(first.path) : analytic_cov(first.path, spec.rate_fn());
    const StrategyRun run = fn(first.path, cov);
    const WealthPath v = wealth_selffinancing(run.strategy, first.path);
    {
        auto os = open_out(cfg.out, "strategy.csv");
        write_strategy_csv(os, run.strategy, v);
    }
    const ArbVerdict verdict = arb_verdict(spec, cfg.sim, fn, cfg.realized_cov);
    Json j = header(spec, cfg);
    j["strategy"] = cfg.strategy.label();
    j["verdict"] = verdict.classification;
    j["stats"] = to_json(verdict);
    j["path0"] = Json{{"min_holding", min_holding(run.strategy)},
                      {"V0", v.values[0]},
                      {"VT", v.final()},
                      {"max_formula_gap", (v.values - run.formula.values).cwiseAbs().maxCoeff()}};
    write_json(cfg.out, "strategy.json", j);
    log << cfg.strategy.label() << " on " << spec.id << ": " << verdict.classification << '\n';
    return kExitOk;
}

Json verify_report(ExperimentConfig& cfg, bool& identities_pass) {
    const ModelSpec spec = cfg.resolve_model();
    const IdentityReport rep = identity_suite(spec, cfg.sim);
    const ArbVerdict verdict =
        arb_verdict(spec, cfg.sim, make_strategy(cfg.strategy, spec, cfg.sim.T), cfg.realized_cov);
    Json j = header(spec, cfg);
    j["strategy"] = cfg.strategy.label();
    j["verdict"] = verdict.classification;
    j["stats"] = to_json(verdict);
    Json ids = Json::array();
    for (const auto& c : rep.checks) ids.push_back(to_json(c));
    j["identities"] = ids;
    j["hitting"] = to_json(rep.hitting);
    if (rep.martingale) j["martingale"] = to_json(*rep.martingale);
    Json diag = Json::object();
    for (const auto& [k, v] : rep.extras) diag[k] = v;
    j["diagnostics"] = diag;
    const auto& k = cfg.strategy.kind;
    if (cfg.strategy.eta && (k == "additive" || k == "multiplicative")) {
        GenSpec gs = GenSpec::parse(cfg.strategy.G);
        gs.modifier = GenSpec::Modifier::None;
        j["horizon"] = to_json(horizon_threshold(*gs.base_function(), spec.x0, *cfg.strategy.eta));
    }
    j["identities_pass"] = rep.all_pass();
    identities_pass = rep.all_pass();
    return j;
}

int cmd_verify(ExperimentConfig cfg, std::ostream& log) {
    bool pass = false;
    const Json j = verify_report(cfg, pass);
    write_json(cfg.out, "verify.json", j);
    for (const auto& c : j["identities"])
        log << (c["pass"].get<bool>() ? "pass " : "FAIL ") << c["name"].get<std::string>() << "  max_dev "
            << c["max_dev"].dump() << "  tol " << c["tol"].dump() << '\n';
    log << "verdict: " << j["verdict"].get<std::string>() << '\n';
    return pass ? kExitOk : kExitIdentity;
}

int cmd_ingest(const std::string& file, const std::string& out_dir, std::ostream& log) {
    const CapPath caps = read_caps(file);
    const EmpiricalGammaH e = empirical_gamma_H(caps);
    {
        auto os = open_out(out_dir, "gammaH.csv");
        write_gamma_csv(os, e.gamma, "gammaH");
    }
    write_json(out_dir, "ingest.json", to_json(e));
    log << "Gamma^H total " << e.total << ", mean slope " << e.eta_hat << '\n';
    return kExitOk;
}

}  // namespace spt
