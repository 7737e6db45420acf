#include "spt/genfn.hpp"

#include "spt/format.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace spt {

namespace {

[[noreturn]] void boundary(const std::string& who, const Vec& x) {
    std::ostringstream os;
    os << who << " is singular at boundary point with min weight " << x.minCoeff();
    throw Error(ErrorCode::BoundaryEvaluation, os.str());
}

class Entropy final : public GeneratingFunction {
public:
    double value(const Vec& x) const override {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] > 0.0) s -= x[i] * std::log(x[i]);
        return s;
    }
    Vec gradient(const Vec& x) const override {
        if (!(x.minCoeff() > 0.0)) boundary("entropy gradient", x);
        return (-x.array().log() - 1.0).matrix();
    }
    Mat hessian(const Vec& x) const override {
        if (!(x.minCoeff() > 0.0)) boundary("entropy Hessian", x);
        return (-x.array().inverse()).matrix().asDiagonal();
    }
    std::string label() const override { return "entropy"; }
};

class Quadratic final : public GeneratingFunction {
public:
    double value(const Vec& x) const override { return 1.0 - x.squaredNorm(); }
    Vec gradient(const Vec& x) const override { return -2.0 * x; }
    Mat hessian(const Vec& x) const override { return -2.0 * Mat::Identity(x.size(), x.size()); }
    std::string label() const override { return "quadratic"; }
};

class GeometricMean final : public GeneratingFunction {
public:
    double value(const Vec& x) const override {
        if (x.minCoeff() <= 0.0) return 0.0;
        const double d = static_cast<double>(x.size());
        return std::exp(x.array().log().sum() / d);
    }
    Vec gradient(const Vec& x) const override {
        if (!(x.minCoeff() > 0.0)) boundary("geometric-mean gradient", x);
        const double d = static_cast<double>(x.size());
        const double R = value(x);
        return (R / d) * x.array().inverse().matrix();
    }
    Mat hessian(const Vec& x) const override {
        if (!(x.minCoeff() > 0.0)) boundary("geometric-mean Hessian", x);
        const double d = static_cast<double>(x.size());
        const double R = value(x);
        const Vec inv = x.array().inverse().matrix();
        Mat h = (R / (d * d)) * inv * inv.transpose();
        h.diagonal() -= (R / d) * inv.array().square().matrix();
        return h;
    }
    std::string label() const override { return "geom_mean"; }
};

class Power final : public GeneratingFunction {
public:
    explicit Power(double q) : q_(q) {
        if (!(q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "power generator needs q >= 1");
    }
    double value(const Vec& x) const override { return std::pow(x[0], q_); }
    Vec gradient(const Vec& x) const override {
        if (!(x[0] > 0.0) && q_ < 2.0) boundary("power gradient", x);
        Vec g = Vec::Zero(x.size());
        g[0] = q_ * std::pow(x[0], q_ - 1.0);
        return g;
    }
    Mat hessian(const Vec& x) const override {
        if (!(x[0] > 0.0) && q_ < 2.0) boundary("power Hessian", x);
        Mat h = Mat::Zero(x.size(), x.size());
        h(0, 0) = q_ * (q_ - 1.0) * std::pow(x[0], q_ - 2.0);
        return h;
    }
    std::string label() const override {
        std::ostringstream os;
        os << "power:q=" << q_;
        return os.str();
    }

private:
    double q_;
};

class Affine final : public GeneratingFunction {
public:
    Affine(GenFnPtr base, double scale, double shift, std::string label)
        : base_(std::move(base)), scale_(scale), shift_(shift), label_(std::move(label)) {}
    double value(const Vec& x) const override { return scale_ * (base_->value(x) - shift_); }
    Vec gradient(const Vec& x) const override { return scale_ * base_->gradient(x); }
    Mat hessian(const Vec& x) const override { return scale_ * base_->hessian(x); }
    std::string label() const override { return label_; }

private:
    GenFnPtr base_;
    double scale_, shift_;
    std::string label_;
};

double parse_double(const std::string& s, const std::string& key) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw Error(ErrorCode::UnknownGenerator, "bad number for " + key + ": " + s);
    return v;
}

// "k1=v1,k2=v2" -> lookup
std::vector<std::pair<std::string, std::string>> split_params(const std::string& s) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string item = s.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::UnknownGenerator, "expected key=value in '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

GenFnPtr make_entropy() { return std::make_shared<Entropy>(); }
GenFnPtr make_quadratic() { return std::make_shared<Quadratic>(); }
GenFnPtr make_geometric_mean() { return std::make_shared<GeometricMean>(); }
GenFnPtr make_power(double q) { return std::make_shared<Power>(q); }

GenFnPtr make_affine(GenFnPtr base, double scale, double shift, std::string label) {
    return std::make_shared<Affine>(std::move(base), scale, shift, std::move(label));
}

GenFnPtr make_normalized(GenFnPtr base, const Vec& mu0) {
    const double g0 = base->value(mu0);
    if (!(g0 > 0.0)) throw Error(ErrorCode::GeneratorNearZero, "cannot normalize by G(mu0) <= 0");
    const std::string label = "normalize(" + base->label() + ")";
    return make_affine(std::move(base), 1.0 / g0, 0.0, label);
}

GenFnPtr make_shift_scaled(GenFnPtr base, double h, double eta, double T) {
    if (!(eta > 0.0) || !(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "shift_scale needs eta > 0 and T > 0");
    std::ostringstream os;
    os << "shift_scale(" << base->label() << ";h=" << h << ",eta=" << eta << ",T=" << T << ")";
    return make_affine(std::move(base), 3.0 / (eta * T), h, os.str());
}

GenSpec GenSpec::parse(const std::string& id) {
    GenSpec spec;
    std::string head = id, modifier;
    if (const auto bar = id.find('|'); bar != std::string::npos) {
        head = id.substr(0, bar);
        modifier = id.substr(bar + 1);
    }
    std::string name = head, params;
    if (const auto colon = head.find(':'); colon != std::string::npos) {
        name = head.substr(0, colon);
        params = head.substr(colon + 1);
    }
    if (name == "entropy" || name == "quadratic" || name == "geom_mean") {
        if (!params.empty()) throw Error(ErrorCode::UnknownGenerator, name + " takes no parameters");
    } else if (name == "power") {
        bool have_q = false;
        for (const auto& [k, v] : split_params(params)) {
            if (k != "q") throw Error(ErrorCode::UnknownGenerator, "power takes only q");
            spec.q = parse_double(v, k);
            have_q = true;
        }
        if (!have_q) throw Error(ErrorCode::UnknownGenerator, "power needs q");
    } else {
        throw Error(ErrorCode::UnknownGenerator, "unknown generating function '" + name + "'");
    }
    spec.base = name;

    if (modifier == "normalize") {
        spec.modifier = Modifier::Normalize;
    } else if (modifier.rfind("shift_scale:", 0) == 0) {
        spec.modifier = Modifier::ShiftScale;
        bool h = false, eta = false, T = false;
        for (const auto& [k, v] : split_params(modifier.substr(12))) {
            if (k == "h") spec.h = parse_double(v, k), h = true;
            else if (k == "eta") spec.eta = parse_double(v, k), eta = true;
            else if (k == "T") spec.T = parse_double(v, k), T = true;
            else throw Error(ErrorCode::UnknownGenerator, "shift_scale takes h, eta, T");
        }
        if (!(h && eta && T)) throw Error(ErrorCode::UnknownGenerator, "shift_scale needs h, eta and T");
    } else if (!modifier.empty()) {
        throw Error(ErrorCode::UnknownGenerator, "unknown modifier '" + modifier + "'");
    }
    return spec;
}

GenFnPtr GenSpec::base_function() const {
    if (base == "entropy") return make_entropy();
    if (base == "quadratic") return make_quadratic();
    if (base == "geom_mean") return make_geometric_mean();
    if (base == "power") return make_power(q);
    throw Error(ErrorCode::UnknownGenerator, "unknown generating function '" + base + "'");
}

GenFnPtr GenSpec::resolve(const Vec& mu0) const {
    auto g = base_function();
    switch (modifier) {
        case Modifier::None: return g;
        case Modifier::Normalize: return make_normalized(std::move(g), mu0);
        case Modifier::ShiftScale: return make_shift_scaled(std::move(g), h, eta, T);
    }
    return g;
}

std::string GenSpec::id() const {
    std::ostringstream os;
    os << base;
    if (base == "power") os << ":q=" << shortest(q);
    if (modifier == Modifier::Normalize) os << "|normalize";
    if (modifier == Modifier::ShiftScale)
        os << "|shift_scale:h=" << shortest(h) << ",eta=" << shortest(eta) << ",T=" << shortest(T);
    return os.str();
}

LyapunovSigma lyapunov_sigma(const GeneratingFunction& G, const Vec& x) {
    if (x.size() != 3) throw Error(ErrorCode::InvalidArgument, "Lyapunov flow is defined for d = 3 only");
    const Vec g = G.gradient(x);
    LyapunovSigma out;
    out.sigma.resize(3);
    out.sigma << g[2] - g[1], g[0] - g[2], g[1] - g[0];
    if (out.sigma.norm() < kNavelTol) throw Error(ErrorCode::AtNavel, "sigma vanishes: point is the navel");
    out.L = -0.5 * out.sigma.dot(G.hessian(x) * out.sigma);
    if (!(out.L > 0.0)) {
        std::ostringstream os;
        os << "L = " << out.L;
        throw Error(ErrorCode::NonpositiveL, os.str());
    }
    return out;
}

GapConstants gap_constants(const GeneratingFunction& G, int n) {
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 subdivisions");
    GapConstants out;
    out.boundary_sup = -std::numeric_limits<double>::infinity();
    out.max_value = -std::numeric_limits<double>::infinity();
    Vec x(3);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            const int k = n - i - j;
            x << static_cast<double>(i) / n, static_cast<double>(j) / n, static_cast<double>(k) / n;
            const double v = G.value(x);
            if (v > out.max_value) out.max_value = v, out.argmax = x;
            if ((i == 0 || j == 0 || k == 0) && v > out.boundary_sup) out.boundary_sup = v;
        }
    }
    return out;
}

}  // namespace spt
