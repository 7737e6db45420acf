// sptlab: command-line front end for the simulation laboratory.
#include "spt/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct RunOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config, "experiment file (key = value lines)")->required();
    cmd->add_option("--out", o.out, "output directory (overrides the file)");
    cmd->add_option("--seed", o.seed, "seed (overrides the file)");
    cmd->add_option("--set", o.sets, "extra key=value setting, repeatable");
}

spt::ExperimentConfig load(const RunOptions& o) {
    auto cfg = spt::ExperimentConfig::load(o.config);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw spt::Error(spt::ErrorCode::ConfigError, kv + ": expected key=value");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.out.empty()) cfg.out = o.out;
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic portfolio theory simulation laboratory"};
    app.require_subcommand(1);

    auto* zoo = app.add_subcommand("zoo", "list or describe the market models");
    zoo->require_subcommand(1);
    zoo->add_subcommand("list", "model ids with a one-line description");
    std::string describe_id;
    auto* describe = zoo->add_subcommand("describe", "parameters, identities and deflator note of a model");
    describe->add_option("model", describe_id, "model id, optionally with parameters")->required();

    RunOptions sim_o, strat_o, ver_o;
    auto* simulate = app.add_subcommand("simulate", "simulate an ensemble");
    add_run_options(simulate, sim_o);
    auto* strategy = app.add_subcommand("strategy", "run a strategy on simulated paths");
    add_run_options(strategy, strat_o);
    auto* verify = app.add_subcommand("verify", "identity suite and arbitrage verdict");
    add_run_options(verify, ver_o);

    std::string caps_file, ingest_out = ".";
    auto* ingest = app.add_subcommand("ingest", "empirical excess growth from a capitalization CSV");
    ingest->add_option("file", caps_file, "CSV with header t,S1,...,Sd")->required();
    ingest->add_option("--out", ingest_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return spt::kExitInvalid;
    }

    try {
        if (zoo->parsed()) {
            if (describe->parsed()) spt::cmd_zoo_describe(describe_id, std::cout);
            else spt::cmd_zoo_list(std::cout);
            return spt::kExitOk;
        }
        if (simulate->parsed()) return spt::cmd_simulate(load(sim_o), std::cout);
        if (strategy->parsed()) return spt::cmd_strategy(load(strat_o), std::cout);
        if (verify->parsed()) return spt::cmd_verify(load(ver_o), std::cout);
        if (ingest->parsed()) return spt::cmd_ingest(caps_file, ingest_out, std::cout);
    } catch (const spt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return spt::kExitInvalid;
    }
    return spt::kExitInvalid;
}
