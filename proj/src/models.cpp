#include "spt/models.hpp"

#include "spt/format.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spt {

namespace {

constexpr double kThird = 1.0 / 3.0;
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

// A x = (x2 - x3, x3 - x1, x1 - x2)
inline void cyclic_diff(const double* x, double* out) noexcept {
    out[0] = x[1] - x[2];
    out[1] = x[2] - x[0];
    out[2] = x[0] - x[1];
}

std::string fmt(double v) { return shortest(v); }

std::string fmt_vec(const Vec& v) {
    std::ostringstream os;
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt(v[i]);
    os << ']';
    return os.str();
}

Vec interior_point(const Vec& x, const std::string& who) {
    const SimplexPoint p = SimplexPoint::validate(x);
    if (!p.interior()) throw Error(ErrorCode::InvalidArgument, who + " needs a point with all weights positive");
    if (x.size() != 3) throw Error(ErrorCode::InvalidArgument, who + " is a d = 3 model");
    return x;
}

// Shared by the expanding and stationary circles: rows (x_{i+1} - x_{i+2}) / sqrt 3 on one driver.
void circle_diffusion(double, const double* x, double* out) {
    cyclic_diff(x, out);
    for (int i = 0; i < 3; ++i) out[i] *= kInvSqrt3;
}

// (Db) b = A (A x) / 3 for the linear circle field.
void circle_milstein(double, const double* x, double* out) {
    double b[3];
    cyclic_diff(x, b);
    cyclic_diff(b, out);
    for (int i = 0; i < 3; ++i) out[i] /= 3.0;
}

Mat trig_circle_path(const TimeGrid& grid, const Mat& dW, double delta, double u, bool expanding) {
    const auto n = static_cast<Eigen::Index>(grid.n_steps);
    Mat pts(n + 1, 3);
    double W = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k) {
        if (k > 0) W += dW(k - 1, 0);
        const double t = grid.time(static_cast<std::size_t>(k));
        const double amp = expanding ? delta * std::exp(0.5 * t) : delta;
        for (int i = 0; i < 3; ++i)
            pts(k, i) = kThird + amp * std::cos(W + 2.0 * std::numbers::pi * (u + i / 3.0));
    }
    return pts;
}

}  // namespace

std::string_view to_string(Scheme s) { return s == Scheme::Milstein ? "milstein" : "euler"; }

Scheme parse_scheme(const std::string& s) {
    if (s == "milstein") return Scheme::Milstein;
    if (s == "euler" || s == "em" || s == "euler_maruyama") return Scheme::EulerMaruyama;
    throw Error(ErrorCode::ConfigError, "scheme: expected 'milstein' or 'euler', got '" + s + "'");
}

void ModelSpec::covariation_rate(double t, const Vec& x, Mat& out) const {
    if (cov_rate) {
        cov_rate(t, x, out);
        return;
    }
    Mat b(d, m);
    diffusion(t, x.data(), b.data());
    out.noalias() = b * b.transpose();
}

CovRateFn ModelSpec::rate_fn() const {
    if (cov_rate) return cov_rate;
    const FieldFn diff = diffusion;
    const int dd = d, mm = m;
    return [diff, dd, mm](double t, const Vec& x, Mat& out) {
        Mat b(dd, mm);
        diff(t, x.data(), b.data());
        out.noalias() = b * b.transpose();
    };
}

double expanding_circle_tstar(const Vec& mu0) { return std::log(1.0 / (6.0 * radial_r(mu0))); }
double spiral_tstar(double delta) { return -2.0 * std::log(9.0 * delta); }

ModelSpec model_expanding_circle(const Vec& v0_in) {
    const Vec v0 = interior_point(v0_in, "expanding_circle");
    ModelSpec s;
    s.name = "expanding_circle";
    s.id = "expanding_circle:v0=" + fmt_vec(v0);
    s.x0 = v0;
    s.diffusion = circle_diffusion;
    s.milstein = circle_milstein;
    // Rotation by the driver about the node, radius growing like e^{t/2}.
    s.exact = [v0](const TimeGrid& grid, const Mat& dW) {
        const auto n = static_cast<Eigen::Index>(grid.n_steps);
        Mat pts(n + 1, 3);
        const double r3 = std::sqrt(3.0);
        double W = 0.0;
        for (Eigen::Index k = 0; k <= n; ++k) {
            if (k > 0) W += dW(k - 1, 0);
            const double e = std::exp(0.5 * grid.time(static_cast<std::size_t>(k))) / 3.0;
            const double c = std::cos(W), sn = std::sin(W);
            const double p = -c + r3 * sn, q = -c - r3 * sn;
            pts(k, 0) = kThird + e * (2.0 * v0[0] * c + v0[1] * p + v0[2] * q);
            pts(k, 1) = kThird + e * (v0[0] * q + 2.0 * v0[1] * c + v0[2] * p);
            pts(k, 2) = kThird + e * (v0[0] * p + v0[1] * q + 2.0 * v0[2] * c);
        }
        return pts;
    };
    s.anchor = "expanding circle; counterexample with Lipschitz dispersion";
    s.summary = "dv_i = (v_{i+1} - v_{i+2}) / sqrt(3) dW, one driver, no drift; r(v(t)) = r(v0) e^t; "
                "exit time >= log(1 / (6 r(v0)))";
    s.deflator = "deflator exists: the weights are martingales up to absorption (deflator 1)";
    s.identities = {"r_exponential", "sum_squares_circle", "sum_to_one", "excess_growth_dominance",
                    "hitting_time_lower_bound"};
    return s;
}

ModelSpec model_expanding_circle_trig(double delta, double u) {
    if (!(delta >= 0.0) || !(delta < 1.0 / 3.0))
        throw Error(ErrorCode::InvalidArgument, "expanding_circle: delta must lie in [0, 1/3)");
    Vec v0(3);
    for (int i = 0; i < 3; ++i) v0[i] = kThird + delta * std::cos(2.0 * std::numbers::pi * (u + i / 3.0));
    // The entries may miss 1 by an ulp; restore the sum on the last coordinate.
    v0[2] = 1.0 - v0[0] - v0[1];
    ModelSpec s = model_expanding_circle(v0);
    s.id = "expanding_circle:delta=" + fmt(delta) + ",u=" + fmt(u);
    s.params = {{"delta", delta}, {"u", u}};
    s.exact = [delta, u](const TimeGrid& grid, const Mat& dW) { return trig_circle_path(grid, dW, delta, u, true); };
    return s;
}

ModelSpec model_slowed(const Vec& w0_in) {
    const Vec w0 = interior_point(w0_in, "slowed");
    const double r0 = radial_r(w0);
    if (!(r0 > 1e-14)) throw Error(ErrorCode::AtNode, "slowed model cannot start at the node (1/3, 1/3, 1/3)");
    const double eps = 1.5 * r0;
    ModelSpec s;
    s.name = "slowed";
    s.id = "slowed:w0=" + fmt_vec(w0);
    s.x0 = w0;
    s.params = {{"r0", r0}, {"epsilon", eps}};
    s.diffusion = [eps](double, const double* x, double* out) {
        const double scale = 1.0 / std::sqrt(std::max(eps, 3.0 * radial_r_unchecked(x)));
        cyclic_diff(x, out);
        for (int i = 0; i < 3; ++i) out[i] *= scale;
    };
    s.milstein = [eps](double, const double* x, double* out) {
        const double r = radial_r_unchecked(x);
        if (3.0 * r > eps) {
            // b = J y / |y| is a unit rotation field; (Db) b = -y / r.
            for (int i = 0; i < 3; ++i) out[i] = -(x[i] - kThird) / r;
        } else {
            double b[3];
            cyclic_diff(x, b);
            cyclic_diff(b, out);
            for (int i = 0; i < 3; ++i) out[i] /= eps;
        }
    };
    s.anchor = "time-changed, slowed-down expanding circle; no short-term relative arbitrage";
    s.summary = "dw_i = (w_{i+1} - w_{i+2}) / sqrt(max(eps, 3 r(w))) dW with eps = 3 r(w0) / 2; "
                "r(w(t)) = r(w0) + t; Gamma^Q(t) = t before stopping; stop >= Q(w0) - 1/2";
    s.deflator = "deflator exists: the weights are martingales up to absorption (deflator 1)";
    s.identities = {"r_linear", "gammaQ_equals_t", "stop_lower_bound", "sum_to_one", "excess_growth_dominance"};
    return s;
}

Vec spiral_psi(double delta, const TimeGrid& grid, const Mat& dW, Scheme scheme) {
    const double tstar = spiral_tstar(delta);
    const double cap = delta * (1.0 - 1e-9), d2 = delta * delta;
    const auto n = static_cast<Eigen::Index>(grid.n_steps);
    Vec psi = Vec::Zero(n + 1);
    for (Eigen::Index k = 1; k <= n; ++k) {
        psi[k] = psi[k - 1];
        if (grid.time(static_cast<std::size_t>(k - 1)) >= tstar) continue;
        const double dB = dW(k - 1, 1);
        const double b = psi[k] * psi[k] - d2;
        double next = psi[k] + b * dB;
        if (scheme == Scheme::Milstein) next += psi[k] * b * (dB * dB - grid.dt);
        psi[k] = std::clamp(next, -cap, cap);
    }
    return psi;
}

ModelSpec model_spiral(double delta) {
    if (!(delta > 0.0) || !(delta < 1.0 / 9.0))
        throw Error(ErrorCode::InvalidArgument, "spiral: delta must lie in (0, 1/9)");
    ModelSpec s;
    s.name = "spiral";
    std::ostringstream id;
    id << "spiral:delta=" << fmt(delta);
    s.id = id.str();
    s.m = 2;
    s.x0 = Vec(3);
    for (int i = 0; i < 3; ++i) s.x0[i] = kThird + 2.0 * delta * std::cos(2.0 * std::numbers::pi * i / 3.0);
    s.x0[2] = 1.0 - s.x0[0] - s.x0[1];
    const double tstar = spiral_tstar(delta);
    s.params = {{"delta", delta}, {"tstar", tstar}};
    s.horizon_cap = tstar;
    s.driver_sim = [delta, tstar](const TimeGrid& grid, const Mat& dW, Scheme scheme) {
        const Vec psi = spiral_psi(delta, grid, dW, scheme);
        const auto n = static_cast<Eigen::Index>(grid.n_steps);
        Mat pts(n + 1, 3);
        double W = 0.0;
        for (Eigen::Index k = 0; k <= n; ++k) {
            const double t = grid.time(static_cast<std::size_t>(k));
            if (k > 0 && grid.time(static_cast<std::size_t>(k - 1)) < tstar) W += dW(k - 1, 0);
            const double amp = (2.0 * delta + psi[k]) * std::exp(0.5 * std::min(t, tstar));
            for (int i = 0; i < 3; ++i) pts(k, i) = kThird + amp * std::cos(W + 2.0 * std::numbers::pi * i / 3.0);
        }
        return pts;
    };
    // d<mu_i, mu_j> / dt = Phi^2 e^t sin_i sin_j + e^t cos_i cos_j (Psi^2 - delta^2)^2,
    // with Phi e^{t/2} = sqrt(2 r / 3) and the angles read off the weights.
    s.cov_rate = [delta, tstar](double t, const Vec& x, Mat& out) {
        out.setZero(3, 3);
        if (t >= tstar) return;
        const double r = radial_r_unchecked(x.data());
        const double A = std::sqrt(2.0 * r / 3.0);
        if (!(A > 0.0)) return;
        const double phi = A * std::exp(-0.5 * t);
        const double psi = phi - 2.0 * delta;
        const double g = psi * psi - delta * delta;
        double sn[3], cs[3];
        for (int i = 0; i < 3; ++i) {
            cs[i] = (x[i] - kThird) / A;
            sn[i] = -(x[(i + 1) % 3] - x[(i + 2) % 3]) / (std::sqrt(3.0) * A);
        }
        const double et = std::exp(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out(i, j) = et * (phi * phi * sn[i] * sn[j] + g * g * cs[i] * cs[j]);
    };
    s.anchor = "spiral: radial martingale perturbation of the circle, two drivers";
    s.summary = "mu_i = 1/3 + Phi e^{t/2} cos(W + 2 pi (i-1) / 3), Phi = 2 delta + Psi, "
                "dPsi = (Psi^2 - delta^2) dB; frozen after T* = -2 log(9 delta)";
    s.deflator = "deflator exists: the weights are martingales (deflator 1)";
    s.identities = {"sum_squares_spiral", "gammaQ_slope", "alpha_rank_two", "sum_to_one", "excess_growth_dominance"};
    return s;
}

ModelSpec model_stationary_circle(double delta, double u) {
    if (!(delta > 0.0) || !(delta < 1.0 / 3.0))
        throw Error(ErrorCode::InvalidArgument, "stationary_circle: delta must lie in (0, 1/3)");
    ModelSpec s;
    s.name = "stationary_circle";
    s.id = "stationary_circle:delta=" + fmt(delta) + (u != 0.0 ? ",u=" + fmt(u) : std::string());
    s.x0 = Vec(3);
    for (int i = 0; i < 3; ++i) s.x0[i] = kThird + delta * std::cos(2.0 * std::numbers::pi * (u + i / 3.0));
    s.x0[2] = 1.0 - s.x0[0] - s.x0[1];
    s.params = {{"delta", delta}, {"u", u}};
    s.drift = [](double, const double* x, double* out) {
        for (int i = 0; i < 3; ++i) out[i] = -0.5 * (x[i] - kThird);
    };
    s.diffusion = circle_diffusion;
    s.milstein = circle_milstein;
    s.exact = [delta, u](const TimeGrid& grid, const Mat& dW) { return trig_circle_path(grid, dW, delta, u, false); };
    s.martingale = false;
    s.anchor = "immediate arbitrage: weights on a fixed circle";
    s.summary = "mu_i = 1/3 + delta cos(W + 2 pi (i-1) / 3); r = 3 delta^2 / 2 constant; "
                "Gamma^Q(t) = 3 delta^2 t / 2";
    s.deflator = "no deflator exists: Q* generates wealth 1 + 3 delta^2 t / (2 Q(mu0)) > 1 for every t > 0";
    s.identities = {"sum_squares_constant", "qstar_wealth", "qstar_wealth_realized", "sum_to_one",
                    "excess_growth_dominance"};
    return s;
}

ModelSpec model_lyapunov_flow(GenFnPtr G, const Vec& mu0_in, double gfrak) {
    const Vec mu0 = interior_point(mu0_in, "lyapunov_flow");
    const double g0 = G->value(mu0);
    if (!(g0 > gfrak))
        throw Error(ErrorCode::InvalidArgument, "lyapunov_flow: G(mu0) must exceed the boundary supremum");
    lyapunov_sigma(*G, mu0);  // AtNavel / NonpositiveL at the start
    ModelSpec s;
    s.name = "lyapunov_flow";
    s.id = "lyapunov_flow:G=" + G->label() + ",mu0=" + fmt_vec(mu0);
    s.x0 = mu0;
    s.params = {{"G0", g0}, {"gfrak", gfrak}};
    s.flow_G = G;
    s.gfrak = gfrak;
    s.diffusion = [G](double, const double* x, double* out) {
        const Vec v = Eigen::Map<const Vec>(x, 3);
        const LyapunovSigma ls = lyapunov_sigma(*G, v);
        const double scale = 1.0 / std::sqrt(ls.L);
        for (int i = 0; i < 3; ++i) out[i] = ls.sigma[i] * scale;
    };
    s.anchor = "Lyapunov flow: G(mu(t)) = G(mu0) - t, no short-term relative arbitrage";
    s.summary = "dmu_i = sigma_i / sqrt(L) dW with sigma the cyclic gradient differences of G and "
                "L = -sigma' D2G sigma / 2; exit time in [G(mu0) - g, G(mu0)]";
    s.deflator = "deflator exists: the weights are martingales up to absorption (deflator 1)";
    s.identities = {"G_decreases_linearly", "gammaG_equals_t", "exit_time_bounds", "sum_to_one",
                    "excess_growth_dominance"};
    return s;
}

ModelSpec model_lyapunov_flow(GenFnPtr G, const Vec& mu0) {
    const GapConstants gc = gap_constants(*G);
    if (G->value(mu0) >= gc.max_value)
        throw Error(ErrorCode::AtNavel, "lyapunov_flow: G(mu0) must be below max G");
    return model_lyapunov_flow(std::move(G), mu0, gc.boundary_sup);
}

ModelSpec model_reflected_two_asset(double mu1_0, double kappa) {
    if (!(mu1_0 > 0.0) || !(mu1_0 < 1.0)) throw Error(ErrorCode::InvalidArgument, "reflected2: mu1_0 must lie in (0, 1)");
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "reflected2: kappa must be positive");
    const double a = 0.25 * mu1_0, b = 1.0 - 0.25 * mu1_0;
    ModelSpec s;
    s.name = "reflected2";
    s.id = "reflected2:mu1_0=" + fmt(mu1_0) + ",kappa=" + fmt(kappa);
    s.d = 2;
    s.x0 = Vec(2);
    s.x0 << mu1_0, 1.0 - mu1_0;
    s.params = {{"mu1_0", mu1_0}, {"kappa", kappa}, {"lower", a}, {"upper", b}};
    auto fold_path = [mu1_0, kappa, a, b](const TimeGrid& grid, const Mat& dW) {
        const auto n = static_cast<Eigen::Index>(grid.n_steps);
        const double len = b - a;
        Mat pts(n + 1, 2);
        double W = 0.0;
        for (Eigen::Index k = 0; k <= n; ++k) {
            if (k > 0) W += dW(k - 1, 0);
            double y = std::fmod(mu1_0 + kappa * W - a, 2.0 * len);
            if (y < 0.0) y += 2.0 * len;
            if (y > len) y = 2.0 * len - y;
            pts(k, 0) = a + y;
            pts(k, 1) = 1.0 - pts(k, 0);
        }
        return pts;
    };
    s.driver_sim = [fold_path](const TimeGrid& grid, const Mat& dW, Scheme) { return fold_path(grid, dW); };
    s.exact = fold_path;
    s.cov_rate = [kappa](double, const Vec&, Mat& out) {
        out.resize(2, 2);
        const double k2 = kappa * kappa;
        out << k2, -k2, -k2, k2;
    };
    s.martingale = false;
    s.anchor = "two assets, mu_1 a reflected Brownian motion; one asset with sufficient variation";
    s.summary = "mu_1 = fold of mu1_0 + kappa W into [mu1_0 / 4, 1 - mu1_0 / 4]; <mu_1>(t) = kappa^2 t";
    s.deflator = "not a martingale model; long-only strong relative arbitrage exists over every horizon";
    s.identities = {"alpha_eigenvalues_01", "fold_range", "sum_to_one", "excess_growth_dominance"};
    return s;
}

namespace {

// "k=v,k=[a,b],..." -> pairs, honoring brackets.
std::vector<std::pair<std::string, std::string>> split_model_params(const std::string& s) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = pos;
        int depth = 0;
        while (end < s.size() && (s[end] != ',' || depth > 0)) {
            if (s[end] == '[') ++depth;
            if (s[end] == ']') --depth;
            ++end;
        }
        const std::string item = s.substr(pos, end - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::UnknownModel, "expected key=value in '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        pos = end + 1;
    }
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw Error(ErrorCode::UnknownModel, "bad number for " + key + ": '" + v + "'");
    return x;
}

Vec to_vec(const std::string& v, const std::string& key) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw Error(ErrorCode::UnknownModel, key + " must be a bracketed list");
    std::vector<double> xs;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) xs.push_back(to_double(item, key));
    Vec out(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = xs[i];
    return out;
}

struct Params {
    std::map<std::string, std::string> kv;
    std::string model;

    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : to_double(it->second, k);
    }
    Vec vec(const std::string& k, const Vec& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : to_vec(it->second, k);
    }
    void only(std::initializer_list<const char*> allowed) const {
        for (const auto& [k, v] : kv) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) throw Error(ErrorCode::UnknownModel, model + ": unknown parameter '" + k + "'");
        }
    }
};

Vec default_mu0() {
    Vec v(3);
    v << 0.5, 0.3, 0.2;
    return v;
}

}  // namespace

const std::vector<std::string>& zoo_names() {
    static const std::vector<std::string> names = {"expanding_circle", "slowed",        "spiral",
                                                   "stationary_circle", "lyapunov_flow", "reflected2"};
    return names;
}

ModelSpec parse_model(const std::string& id) {
    Params p;
    p.model = id;
    std::string name = id;
    if (const auto colon = id.find(':'); colon != std::string::npos) {
        name = id.substr(0, colon);
        for (auto& [k, v] : split_model_params(id.substr(colon + 1))) p.kv[k] = v;
    }
    p.model = name;
    if (name == "expanding_circle") {
        p.only({"delta", "u", "v0"});
        if (p.kv.count("v0")) {
            if (p.kv.count("delta") || p.kv.count("u"))
                throw Error(ErrorCode::UnknownModel, "expanding_circle: give either v0 or delta/u");
            return model_expanding_circle(p.vec("v0", {}));
        }
        return model_expanding_circle_trig(p.num("delta", 0.1), p.num("u", 0.0));
    }
    if (name == "slowed") {
        p.only({"w0"});
        return model_slowed(p.vec("w0", default_mu0()));
    }
    if (name == "spiral") {
        p.only({"delta"});
        return model_spiral(p.num("delta", 0.01));
    }
    if (name == "stationary_circle") {
        p.only({"delta", "u"});
        return model_stationary_circle(p.num("delta", 0.1), p.num("u", 0.0));
    }
    if (name == "lyapunov_flow") {
        p.only({"G", "mu0"});
        const auto it = p.kv.find("G");
        const std::string g = it == p.kv.end() ? "geom_mean" : it->second;
        const Vec mu0 = p.vec("mu0", default_mu0());
        ModelSpec s = model_lyapunov_flow(parse_generating_function(g, mu0), mu0);
        s.id = "lyapunov_flow:G=" + g + ",mu0=" + fmt_vec(mu0);
        return s;
    }
    if (name == "reflected2") {
        p.only({"mu1_0", "kappa"});
        return model_reflected_two_asset(p.num("mu1_0", 0.5), p.num("kappa", 0.3));
    }
    throw Error(ErrorCode::UnknownModel, "unknown model '" + name + "'");
}

}  // namespace spt
