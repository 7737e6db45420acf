#include "helpers.hpp"

#include "spt/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace spt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sptlab_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Exit status of the CLI with the given arguments; output goes to log.
int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(SPTLAB_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return ExperimentConfig::parse(in);
}

std::string error_text(const std::string& text) {
    try {
        parse(text).resolve_model();
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        return e.what();
    }
    FAIL("expected ConfigError");
    return {};
}

}  // namespace

TEST_CASE("experiment config parsing") {
    ExperimentConfig c = parse("# comment\nmodel = slowed\nseed = 7\n  dt=0.001 \nn_paths = 12\nscheme = euler\n"
                               "strategy = additive\nG = entropy|normalize\ncov = realized\nout = /tmp/x\n");
    const ModelSpec m = c.resolve_model();
    CHECK(m.name == "slowed");
    CHECK(c.sim.seed == 7);
    CHECK(c.sim.dt == 0.001);
    CHECK(c.sim.n_paths == 12);
    CHECK(c.sim.scheme == Scheme::EulerMaruyama);
    CHECK(c.realized_cov);
    CHECK(c.strategy.G == "entropy|normalize");
    CHECK(!c.T_given);
    CHECK(std::abs(c.sim.T - default_horizon(m, 0.001)) < 1e-15);

    CHECK(error_text("model = slowed\n").find("seed") != std::string::npos);
    CHECK(error_text("seed = 1\n").find("model") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\ncolour = red\n").find("colour") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\nseed = 2\n").find("seed") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = -1\n").find("seed") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\ndt = fast\n").find("dt") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\nthreads = 0\n").find("threads") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\nG = cubic\n").find("G") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\nstrategy = hedge\n").find("strategy") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\nrefine = maybe\n").find("refine") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\njust text\n").find("line 3") != std::string::npos);
    CHECK(error_text("model = slowed\nseed = 1\ndt = 0.3\nT = 1\n").find("T") != std::string::npos);
    try {
        parse("model = bogus\nseed = 1\n").resolve_model();
        FAIL("expected UnknownModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownModel);
    }
}

TEST_CASE("zoo commands") {
    std::ostringstream list;
    cmd_zoo_list(list);
    const std::string s = list.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
    for (const auto& name : zoo_names()) CHECK(s.find(name) != std::string::npos);

    std::ostringstream d;
    cmd_zoo_describe("stationary_circle", d);
    CHECK(d.str().find("no deflator exists") != std::string::npos);
    try {
        cmd_zoo_describe("bogus", d);
        FAIL("expected UnknownModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownModel);
    }
}

TEST_CASE("CLI exit codes and outputs") {
    const fs::path dir = scratch("cli");
    const fs::path log = dir / "log.txt";

    CHECK(run_cli("zoo list", log) == 0);
    CHECK(run_cli("zoo describe bogus", log) == 1);
    CHECK(slurp(log).find("UnknownModel") != std::string::npos);
    CHECK(run_cli("frobnicate", log) == 1);

    write(dir / "noseed.cfg", "model = slowed\n");
    CHECK(run_cli("verify --config " + (dir / "noseed.cfg").string(), log) == 1);
    CHECK(slurp(log).find("ConfigError: seed") != std::string::npos);
    CHECK(run_cli("verify --config " + (dir / "missing.cfg").string(), log) == 1);

    write(dir / "slowed.cfg", "model = slowed\nseed = 7\nn_paths = 20\n");
    CHECK(run_cli("verify --config " + (dir / "slowed.cfg").string() + " --out " + (dir / "v").string(), log) == 0);
    const std::string report = slurp(dir / "v" / "verify.json");
    CHECK(report.find("\"identities_pass\": true") != std::string::npos);
    CHECK(report.find("\"verdict\"") != std::string::npos);

    // Too coarse a step breaks the expanding-circle law.
    write(dir / "coarse.cfg", "model = expanding_circle:delta=0.1,u=0.0\nseed = 7\ndt = 0.1\nn_paths = 20\n");
    CHECK(run_cli("verify --config " + (dir / "coarse.cfg").string() + " --out " + (dir / "c").string(), log) == 2);

    write(dir / "sim.cfg", "model = reflected2\nseed = 1\ndt = 0.01\nT = 0.1\nn_paths = 2\n");
    CHECK(run_cli("simulate --config " + (dir / "sim.cfg").string() + " --out " + (dir / "s").string(), log) == 0);
    const std::string csv = slurp(dir / "s" / "ensemble.csv");
    CHECK(csv.rfind("t,path_id,mu1,mu2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 23);
    CHECK(fs::exists(dir / "s" / "simulate.json"));

    CHECK(run_cli("strategy --config " + (dir / "sim.cfg").string() + " --set strategy=one_asset --out " +
                      (dir / "t").string(), log) == 0);
    CHECK(slurp(dir / "t" / "strategy.csv").rfind("t,theta1,theta2,V\n", 0) == 0);
    CHECK(run_cli("strategy --config " + (dir / "sim.cfg").string() + " --set strategy", log) == 1);

    write(dir / "caps.csv", "t,S1,S2\n0,2,1\n0.01,1,2\n0.02,2,1\n");
    CHECK(run_cli("ingest " + (dir / "caps.csv").string() + " --out " + (dir / "i").string(), log) == 0);
    CHECK(slurp(dir / "i" / "gammaH.csv").rfind("t,gammaH\n", 0) == 0);
    CHECK(slurp(dir / "i" / "ingest.json").find("\"slope_check\"") != std::string::npos);
    write(dir / "bad.csv", "t,S1,S2\n0,2,1\n0.01,0,2\n");
    CHECK(run_cli("ingest " + (dir / "bad.csv").string(), log) == 1);
    CHECK(slurp(log).find("NonpositiveCap") != std::string::npos);
}

TEST_CASE("verify reports are reproducible across runs and thread counts") {
    const fs::path dir = scratch("repro");
    const fs::path log = dir / "log.txt";
    write(dir / "r.cfg", "model = slowed:w0=[0.5,0.3,0.2]\nseed = 3\nn_paths = 24\n");
    const std::string base = "verify --config " + (dir / "r.cfg").string();
    CHECK(run_cli(base + " --out " + (dir / "a").string(), log) == 0);
    CHECK(run_cli(base + " --out " + (dir / "b").string(), log) == 0);
    CHECK(run_cli(base + " --set threads=8 --out " + (dir / "c").string(), log) == 0);
    const std::string a = slurp(dir / "a" / "verify.json");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b" / "verify.json"));
    CHECK(a == slurp(dir / "c" / "verify.json"));
    fs::remove_all(dir.parent_path());
}
