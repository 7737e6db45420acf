#include "spt/quadvar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace spt {

CovariationPath realized_cov(const WeightPath& path) {
    if (path.n_points() < 2) throw Error(ErrorCode::InvalidArgument, "realized covariation needs at least 2 points");
    CovariationPath cov{path.grid(), {}, CovSource::Realized};
    cov.increments.reserve(path.grid().n_steps);
    const Mat& p = path.points();
    for (Eigen::Index k = 0; k + 1 < p.rows(); ++k) {
        const Vec d = (p.row(k + 1) - p.row(k)).transpose();
        cov.increments.push_back(d * d.transpose());
    }
    return cov;
}

CovariationPath analytic_cov(const WeightPath& path, const CovRateFn& rate) {
    CovariationPath cov{path.grid(), {}, CovSource::Analytic};
    const auto n = path.grid().n_steps;
    const auto d = static_cast<Eigen::Index>(path.dim());
    const std::size_t stop = path.stop_index().value_or(n + 1);
    cov.increments.reserve(n);
    Mat c(d, d);
    for (std::size_t k = 0; k < n; ++k) {
        if (k >= stop) {
            cov.increments.push_back(Mat::Zero(d, d));
            continue;
        }
        rate(path.grid().time(k), path.point(k), c);
        cov.increments.push_back(c * path.grid().dt);
    }
    return cov;
}

GammaPath gamma_G(const GeneratingFunction& G, const WeightPath& path, const CovariationPath& cov) {
    if (!cov.grid.same_as(path.grid()) || cov.increments.size() != path.grid().n_steps)
        throw Error(ErrorCode::GridMismatch, "covariation and path grids differ");
    const auto n = path.grid().n_steps;
    const std::size_t stop = path.stop_index().value_or(n + 1);
    GammaPath out{path.grid(), Vec::Zero(static_cast<Eigen::Index>(n + 1))};
    for (std::size_t k = 0; k < n; ++k) {
        double inc = 0.0;
        if (k < stop) inc = -0.5 * G.hessian(path.point(k)).cwiseProduct(cov.increments[k]).sum();
        out.values[static_cast<Eigen::Index>(k + 1)] = out.values[static_cast<Eigen::Index>(k)] + inc;
    }
    return out;
}

GammaPath gamma_H_weighted(const WeightPath& path) {
    const auto n = path.grid().n_steps;
    const std::size_t stop = path.stop_index().value_or(n + 1);
    const Mat& p = path.points();
    GammaPath out{path.grid(), Vec::Zero(static_cast<Eigen::Index>(n + 1))};
    for (std::size_t k = 0; k < n; ++k) {
        double inc = 0.0;
        if (k < stop) {
            const auto kk = static_cast<Eigen::Index>(k);
            for (Eigen::Index i = 0; i < p.cols(); ++i) {
                const double a = p(kk, i), b = p(kk + 1, i);
                if (!(a > 0.0) || !(b > 0.0)) {
                    std::ostringstream os;
                    os << "weight " << i << " is not positive near step " << k;
                    throw Error(ErrorCode::NonpositiveWeight, os.str());
                }
                const double dl = std::log(b) - std::log(a);
                inc += a * dl * dl;
            }
            inc *= 0.5;
        }
        out.values[static_cast<Eigen::Index>(k + 1)] = out.values[static_cast<Eigen::Index>(k)] + inc;
    }
    return out;
}

AlphaPath alpha_decompose(const CovariationPath& cov) {
    AlphaPath out;
    out.grid = cov.grid;
    const auto n = cov.increments.size();
    out.alpha.reserve(n);
    out.gammaQ_increments = Vec::Zero(static_cast<Eigen::Index>(n));
    out.degenerate.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const Mat& c = cov.increments[k];
        const double tr = c.trace();
        out.gammaQ_increments[static_cast<Eigen::Index>(k)] = tr;
        if (tr > kAlphaTraceFloor) {
            out.alpha.push_back(c / tr);
        } else {
            out.alpha.push_back(Mat::Zero(c.rows(), c.cols()));
            out.degenerate[k] = true;
        }
    }
    return out;
}

namespace {

Eigen::Vector3d any_unit_orthogonal(const Eigen::Vector3d& w, Eigen::Vector3d& u, Eigen::Vector3d& v) {
    if (std::abs(w[0]) > std::abs(w[1])) {
        const double inv = 1.0 / std::sqrt(w[0] * w[0] + w[2] * w[2]);
        u = Eigen::Vector3d(-w[2] * inv, 0.0, w[0] * inv);
    } else {
        const double inv = 1.0 / std::sqrt(w[1] * w[1] + w[2] * w[2]);
        u = Eigen::Vector3d(0.0, w[2] * inv, -w[1] * inv);
    }
    v = w.cross(u);
    return u;
}

// Null vector of (A - lambda I) for a simple eigenvalue: largest cross product of two rows.
Eigen::Vector3d eigenvector_simple(const Eigen::Matrix3d& a, double lambda) {
    const Eigen::Matrix3d b = a - lambda * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d r0 = b.row(0).transpose(), r1 = b.row(1).transpose(), r2 = b.row(2).transpose();
    const Eigen::Vector3d c01 = r0.cross(r1), c02 = r0.cross(r2), c12 = r1.cross(r2);
    const double n01 = c01.squaredNorm(), n02 = c02.squaredNorm(), n12 = c12.squaredNorm();
    if (n01 >= n02 && n01 >= n12 && n01 > 0.0) return c01 / std::sqrt(n01);
    if (n02 >= n12 && n02 > 0.0) return c02 / std::sqrt(n02);
    if (n12 > 0.0) return c12 / std::sqrt(n12);
    return Eigen::Vector3d::UnitX();
}

// Eigenvector for lambda within the plane orthogonal to w.
Eigen::Vector3d eigenvector_in_complement(const Eigen::Matrix3d& a, const Eigen::Vector3d& w, double lambda) {
    Eigen::Vector3d u, v;
    any_unit_orthogonal(w, u, v);
    const Eigen::Vector3d au = a * u, av = a * v;
    double m00 = u.dot(au) - lambda, m01 = u.dot(av), m11 = v.dot(av) - lambda;
    const double a00 = std::abs(m00), a01 = std::abs(m01), a11 = std::abs(m11);
    if (a00 >= a11) {
        if (std::max(a00, a01) > 0.0) {
            if (a00 >= a01) {
                m01 /= m00;
                m00 = 1.0 / std::sqrt(1.0 + m01 * m01);
                m01 *= m00;
            } else {
                m00 /= m01;
                m01 = 1.0 / std::sqrt(1.0 + m00 * m00);
                m00 *= m01;
            }
            return m01 * u - m00 * v;
        }
        return u;
    }
    if (std::max(a11, a01) > 0.0) {
        if (a11 >= a01) {
            m01 /= m11;
            m11 = 1.0 / std::sqrt(1.0 + m01 * m01);
            m01 *= m11;
        } else {
            m11 /= m01;
            m01 = 1.0 / std::sqrt(1.0 + m11 * m11);
            m11 *= m01;
        }
        return m11 * u - m01 * v;
    }
    return u;
}

void check_symmetric(const Eigen::Matrix3d& m) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) {
        std::ostringstream os;
        os << "asymmetry " << asym;
        throw Error(ErrorCode::NotSymmetric, os.str());
    }
}

// Eigenvalues of the shifted and scaled matrix b = (m - q I) / scale, ascending, plus (q, scale).
struct Shifted {
    Eigen::Matrix3d b;
    double q = 0.0, scale = 0.0;
    std::array<double, 3> values{};
    bool diagonal = false;
    double half_det = 0.0;
};

Shifted shifted_eigenvalues(const Eigen::Matrix3d& m_in) {
    check_symmetric(m_in);
    const Eigen::Matrix3d m = 0.5 * (m_in + m_in.transpose());
    Shifted s;
    s.scale = m.cwiseAbs().maxCoeff();
    if (s.scale == 0.0) {
        s.b.setZero();
        s.diagonal = true;
        return s;
    }
    const Eigen::Matrix3d a = m / s.scale;
    s.q = a.trace() / 3.0;
    s.b = a - s.q * Eigen::Matrix3d::Identity();
    const double off = s.b(0, 1) * s.b(0, 1) + s.b(0, 2) * s.b(0, 2) + s.b(1, 2) * s.b(1, 2);
    if (off == 0.0) {
        s.diagonal = true;
        s.values = {s.b(0, 0), s.b(1, 1), s.b(2, 2)};
        std::sort(s.values.begin(), s.values.end());
        return s;
    }
    const double p2 = s.b(0, 0) * s.b(0, 0) + s.b(1, 1) * s.b(1, 1) + s.b(2, 2) * s.b(2, 2) + 2.0 * off;
    const double p = std::sqrt(p2 / 6.0);
    const Eigen::Matrix3d c = s.b / p;
    s.half_det = std::clamp(0.5 * c.determinant(), -1.0, 1.0);
    const double phi = std::acos(s.half_det) / 3.0;
    const double hi = 2.0 * p * std::cos(phi);
    const double lo = 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    // The closed form is accurate for the eigenvalue set apart from the other two; the pair
    // comes from the 2x2 block on its orthogonal complement, which stays accurate when they coincide.
    const double simple = s.half_det >= 0.0 ? hi : lo;
    Eigen::Vector3d u, v;
    any_unit_orthogonal(eigenvector_simple(s.b, simple), u, v);
    const Eigen::Vector3d bu = s.b * u, bv = s.b * v;
    const double m00 = u.dot(bu), m01 = u.dot(bv), m11 = v.dot(bv);
    const double centre = 0.5 * (m00 + m11), radius = std::hypot(0.5 * (m00 - m11), m01);
    s.values = {simple, centre - radius, centre + radius};
    std::sort(s.values.begin(), s.values.end());
    return s;
}

}  // namespace

std::array<double, 3> eigen_sym3(const Eigen::Matrix3d& m) {
    const Shifted s = shifted_eigenvalues(m);
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = s.scale * (s.values[static_cast<std::size_t>(i)] + s.q);
    return out;
}

SymEigen3 eigen_sym3_vectors(const Eigen::Matrix3d& m) {
    const Shifted s = shifted_eigenvalues(m);
    SymEigen3 out;
    for (int i = 0; i < 3; ++i) out.values[static_cast<std::size_t>(i)] = s.scale * (s.values[static_cast<std::size_t>(i)] + s.q);
    if (s.diagonal) {
        // Diagonal (or zero) matrix: sort the coordinate axes with their entries.
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s.b(a, a) < s.b(b, b); });
        out.vectors.setZero();
        for (int i = 0; i < 3; ++i) out.vectors(idx[static_cast<std::size_t>(i)], i) = 1.0;
        return out;
    }
    // Start from the eigenvalue that is best separated from the other two.
    Eigen::Vector3d v0, v1, v2;
    if (s.half_det >= 0.0) {
        v2 = eigenvector_simple(s.b, s.values[2]);
        v1 = eigenvector_in_complement(s.b, v2, s.values[1]);
        v0 = v1.cross(v2);
    } else {
        v0 = eigenvector_simple(s.b, s.values[0]);
        v1 = eigenvector_in_complement(s.b, v0, s.values[1]);
        v2 = v0.cross(v1);
    }
    out.vectors.col(0) = v0;
    out.vectors.col(1) = v1;
    out.vectors.col(2) = v2;
    return out;
}

MonotoneVerdict slope_monotone_check(const GammaPath& g, double eta, double window) {
    MonotoneVerdict v;
    const double dt = g.grid.dt;
    const double t_end = g.grid.t0 + window;
    for (std::size_t k = 0; k < g.grid.n_steps; ++k) {
        if (g.grid.time(k + 1) > t_end + 1e-9 * dt) break;
        const double shortfall = eta * dt - g.increment(k);
        if (shortfall > 1e-10) {
            if (!v.first_violation) v.first_violation = k;
            v.holds = false;
        }
        v.max_violation = std::max(v.max_violation, shortfall);
    }
    return v;
}

MonotoneVerdict excess_dominance_check(const GammaPath& gH, const GammaPath& gQ) {
    if (!gH.grid.same_as(gQ.grid)) throw Error(ErrorCode::GridMismatch, "Gamma paths on different grids");
    MonotoneVerdict v;
    for (std::size_t k = 0; k < gH.grid.n_steps; ++k) {
        const double shortfall = gQ.increment(k) - 2.0 * gH.increment(k);
        if (shortfall > 1e-10) {
            if (!v.first_violation) v.first_violation = k;
            v.holds = false;
        }
        v.max_violation = std::max(v.max_violation, shortfall);
    }
    return v;
}

double lemma_K(const GeneratingFunction& G, int n, int d) {
    if (n < d + 1) throw Error(ErrorCode::InvalidArgument, "region {min x_i >= 1/n} needs n > d");
    const int steps = 50 * n - 50 * d;  // (1 - d/n) / pitch, pitch = 1/(50 n)
    const double lo = 1.0 / n;
    const double pitch = 1.0 / (50.0 * n);
    double best = 0.0;
    Vec x(d);
    if (d == 2) {
        for (int i = 0; i <= steps; ++i) {
            x << lo + i * pitch, 0.0;
            x[1] = 1.0 - x[0];
            best = std::max(best, G.hessian(x).cwiseAbs().sum());
        }
    } else if (d == 3) {
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; i + j <= steps; ++j) {
                x << lo + i * pitch, lo + j * pitch, 0.0;
                x[2] = 1.0 - x[0] - x[1];
                best = std::max(best, G.hessian(x).cwiseAbs().sum());
            }
        }
    } else {
        throw Error(ErrorCode::InvalidArgument, "K_n grid search supports d = 2 or 3");
    }
    return best;
}

double lemma_C_constant(const GeneratingFunction& G, int n, double eta, int d) {
    if (eta == 0.0) return 0.0;
    const double K = lemma_K(G, n, d);
    if (!(K > 0.0)) throw Error(ErrorCode::InvalidArgument, "Hessian vanishes on the region");
    return 2.0 * eta / K;
}

void write_gamma_csv(std::ostream& os, const GammaPath& g, const std::string& column) {
    os << "t," << column << '\n';
    os.precision(17);
    for (std::size_t k = 0; k <= g.grid.n_steps; ++k)
        os << g.grid.time(k) << ',' << g.values[static_cast<Eigen::Index>(k)] << '\n';
}

void write_alpha_csv(std::ostream& os, const AlphaPath& a) {
    os << "t,a11,a12,a13,a21,a22,a23,a31,a32,a33,lambda1,lambda2,lambda3\n";
    os.precision(17);
    for (std::size_t k = 0; k < a.alpha.size(); ++k) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        const Mat& al = a.alpha[k];
        m.topLeftCorner(al.rows(), al.cols()) = al;
        const auto ev = eigen_sym3(m);
        os << a.grid.time(k);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << ',' << m(i, j);
        for (double e : ev) os << ',' << e;
        os << '\n';
    }
}

}  // namespace spt
