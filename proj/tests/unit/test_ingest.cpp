#include "helpers.hpp"

#include "spt/engine.hpp"
#include "spt/ingest.hpp"

#include <cmath>
#include <sstream>

using namespace spt;
using testing::vec;

namespace {

CapPath parse(const std::string& text) {
    std::istringstream in(text);
    return read_caps(in);
}

// Code and message of the error raised while reading text.
std::pair<ErrorCode, std::string> error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return {e.code(), e.what()};
    }
    FAIL("expected an error");
    return {};
}

}  // namespace

TEST_CASE("read_caps: worked file") {
    const CapPath c = parse("t,S1,S2\n0,2,2\n0.0833333333333333,3,1\n");
    const WeightPath w = weights_from_caps(c);
    CHECK(w.point(0) == vec({0.5, 0.5}));
    CHECK(w.point(1) == vec({0.75, 0.25}));
    // Column names after t are free; blank lines and CR line ends are accepted.
    CHECK(parse("t,IBM,GE,XOM\r\n\r\n0,1,2,3\r\n0.01,1,2,3\r\n").dim() == 3);
}

TEST_CASE("read_caps: monthly grid") {
    std::ostringstream os;
    os << "t,S1,S2\n";
    os.precision(17);
    for (int k = 0; k < 120; ++k) os << 1926.0 + k / 12.0 << ',' << 100 + k << ',' << 50 + 2 * k << '\n';
    const CapPath c = parse(os.str());
    CHECK(c.grid().n_steps == 119);
    CHECK(std::abs(c.grid().dt - 1.0 / 12.0) < 1e-12);
    CHECK(c.grid().t0 == 1926.0);
}

TEST_CASE("read_caps: errors name the line") {
    auto [code, what] = error_of("t,S1,S2\n0,1,1\n0.01,0,1\n");
    CHECK(code == ErrorCode::NonpositiveCap);
    CHECK(what.find("line 3") != std::string::npos);

    std::tie(code, what) = error_of("t,S1,S2\n0,1,1\n0.01,-2,1\n");
    CHECK(code == ErrorCode::NonpositiveCap);

    std::tie(code, what) = error_of("t,S1,S2\n0,1,1\n0.01,abc,1\n");
    CHECK(code == ErrorCode::ParseError);
    CHECK(what.find("line 3") != std::string::npos);

    std::tie(code, what) = error_of("t,S1,S2\n0,1,1\n0.01,1\n");
    CHECK(code == ErrorCode::ParseError);

    std::tie(code, what) = error_of("time,S1,S2\n0,1,1\n0.01,1,1\n");
    CHECK(code == ErrorCode::ParseError);
    CHECK(what.find("line 1") != std::string::npos);

    std::tie(code, what) = error_of("t,S1,S2\n0,1,1\n");
    CHECK(code == ErrorCode::ParseError);

    std::tie(code, what) = error_of("t,S1,S2\n0,1,1\n0.01,1,1\n0.03,1,1\n0.04,1,1\n");
    CHECK(code == ErrorCode::NonuniformGrid);
    CHECK(what.find("line 3") != std::string::npos);

    std::tie(code, what) = error_of("t,S1,S2\n0,1,1\n0.01,1,1\n0.01,1,1\n");
    CHECK(code == ErrorCode::NonuniformGrid);
    CHECK(what.find("line 4") != std::string::npos);

    std::tie(code, what) = error_of("t,S1,S2\n1990,1,1\n1991,1,1\n");
    CHECK(code == ErrorCode::GridTooCoarse);

    try {
        read_caps(std::string("/nonexistent/caps.csv"));
        FAIL("expected IOError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IOError);
    }
}

TEST_CASE("empirical excess growth") {
    const EmpiricalGammaH flat = empirical_gamma_H(parse("t,S1,S2,S3\n0,5,3,2\n0.05,10,6,4\n0.1,1,0.6,0.4\n"));
    CHECK(flat.gamma.values.isZero(0.0));
    CHECK(flat.eta_hat == 0.0);

    // Alternating (2,1), (1,2): each step contributes (log 2)^2 / 2.
    std::string text = "t,S1,S2\n";
    for (int k = 0; k <= 12; ++k) text += std::to_string(k / 100.0) + (k % 2 ? ",1,2\n" : ",2,1\n");
    const EmpiricalGammaH alt = empirical_gamma_H(parse(text));
    const double l2 = std::log(2.0);
    CHECK(std::abs(alt.total - 12 * l2 * l2 / 2) < 1e-14);
    CHECK(std::abs(alt.eta_hat - alt.total / 0.12) < 1e-12);
    CHECK(alt.eta_checked == 0.9 * alt.eta_hat);
    CHECK(alt.slope_check.holds);
}

TEST_CASE("round trip: exported weights are read back") {
    // Dyadic weights sum to exactly 1, so the read-back weights are the written ones.
    std::vector<Vec> rows;
    for (int k = 0; k <= 40; ++k) {
        const double a = 0.25 + (k % 7) / 64.0, b = 0.5 - (k % 5) / 128.0;
        rows.push_back(vec({a, b, 1.0 - a - b}));
    }
    const WeightPath dy = testing::path_of(rows, 1.0 / 64);
    std::stringstream ss;
    write_caps_csv(ss, dy);
    const EmpiricalGammaH e = empirical_gamma_H(read_caps(ss));
    CHECK(e.gamma.values == gamma_H_weighted(dy).values);

    // Simulated weights sum to 1 within rounding, so the division by the total perturbs
    // them by a few ulps.
    const ModelSpec m = model_expanding_circle_trig(0.1, 0.0);
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.seed = 8;
    const PathSample s = simulate_path(m, cfg, 0);
    std::stringstream sim;
    write_caps_csv(sim, s.path);
    const CapPath caps = read_caps(sim);
    CHECK(caps.caps() == s.path.points());
    const EmpiricalGammaH es = empirical_gamma_H(caps);
    const GammaPath realized = gamma_H_weighted(s.path);
    CHECK((es.gamma.values - realized.values).cwiseAbs().maxCoeff() <= 1e-12 * realized.final());
}

TEST_CASE("empirical Gamma^H converges to the analytic value") {
    // Synthetic caps from exact expanding-circle paths on shared noise. The gap to the analytic
    // value is the sampling error of squared increments, so it shrinks like sqrt(dt).
    const ModelSpec m = model_expanding_circle_trig(0.1, 0.0);
    std::vector<double> errs;
    for (std::size_t factor : {4, 2, 1}) {
        const TimeGrid g = TimeGrid::covering(1.0, 2.5e-4 * static_cast<double>(factor));
        double e = 0.0;
        for (std::size_t i = 0; i < 100; ++i) {
            const Mat dW = brownian_increments(31, i, 4000, 1, 2.5e-4);
            const WeightPath p = exact_with_noise(m, g, coarsen_increments(dW, factor));
            std::stringstream ss;
            write_caps_csv(ss, p);
            const double emp = empirical_gamma_H(read_caps(ss)).total;
            const double ana = gamma_G(*make_entropy(), p, analytic_cov(p, m.rate_fn())).final();
            e += std::abs(emp - ana) / ana / 100.0;
        }
        errs.push_back(e);
    }
    CHECK(errs[2] < 0.05);
    CHECK(errs[0] > errs[1]);
    CHECK(errs[1] > errs[2]);
}
