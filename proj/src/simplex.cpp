#include "spt/simplex.hpp"

#include <cmath>
#include <sstream>

namespace spt {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::SumNotOne: return "SumNotOne";
        case ErrorCode::NotOnHyperplane: return "NotOnHyperplane";
        case ErrorCode::BoundaryEvaluation: return "BoundaryEvaluation";
        case ErrorCode::AtNavel: return "AtNavel";
        case ErrorCode::NonpositiveL: return "NonpositiveL";
        case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::GeneratorNearZero: return "GeneratorNearZero";
        case ErrorCode::Mu1NearZero: return "Mu1NearZero";
        case ErrorCode::SpecViolation: return "SpecViolation";
        case ErrorCode::AtNode: return "AtNode";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonpositiveCap: return "NonpositiveCap";
        case ErrorCode::NonuniformGrid: return "NonuniformGrid";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::UnknownGenerator: return "UnknownGenerator";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IOError: return "IOError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

void check_point(std::span<const double> x, std::size_t row, bool with_row) {
    const auto where = [&](std::size_t i) {
        std::ostringstream os;
        if (with_row) os << "row " << row << ", ";
        os << "index " << i;
        return os.str();
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0)) {
            std::ostringstream os;
            os << where(i) << " has weight " << x[i];
            throw Error(ErrorCode::NegativeWeight, os.str());
        }
        sum += x[i];
    }
    if (!(std::abs(sum - 1.0) <= kSimplexTol)) {
        std::ostringstream os;
        os.precision(17);
        if (with_row) os << "row " << row << ", ";
        os << "sum = " << sum;
        throw Error(ErrorCode::SumNotOne, os.str());
    }
}

}  // namespace

SimplexPoint SimplexPoint::validate(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, "simplex dimension must be at least 2");
    check_point(x, 0, false);
    Vec w(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) w[static_cast<Eigen::Index>(i)] = x[i];
    return SimplexPoint(std::move(w));
}

SimplexPoint validate_simplex(std::span<const double> x) { return SimplexPoint::validate(x); }

TimeGrid TimeGrid::make(double t0, double dt, std::size_t n_steps) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    return TimeGrid{t0, dt, n_steps};
}

TimeGrid TimeGrid::covering(double T, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    if (!(T >= dt * (1.0 - 1e-9))) throw Error(ErrorCode::InvalidArgument, "horizon must be at least one step");
    const double steps = T / dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
        std::ostringstream os;
        os << "horizon " << T << " is not a multiple of dt " << dt;
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    return TimeGrid{0.0, dt, static_cast<std::size_t>(rounded)};
}

std::size_t TimeGrid::index_at(double t) const noexcept {
    if (t <= t0) return 0;
    const double k = std::floor((t - t0) / dt + 1e-9);
    if (k >= static_cast<double>(n_steps)) return n_steps;
    return static_cast<std::size_t>(k);
}

bool TimeGrid::same_as(const TimeGrid& other) const noexcept {
    return n_steps == other.n_steps && t0 == other.t0 && dt == other.dt;
}

WeightPath::WeightPath(TimeGrid grid, Mat points, HittingRecord hit)
    : grid_(grid), points_(std::move(points)), hit_(std::move(hit)) {
    if (static_cast<std::size_t>(points_.rows()) != grid_.n_points())
        throw Error(ErrorCode::GridMismatch, "weight path row count does not match the grid");
    if (points_.cols() < 2) throw Error(ErrorCode::InvalidArgument, "weight path needs at least 2 assets");
    for (Eigen::Index k = 0; k < points_.rows(); ++k) {
        const Vec row = points_.row(k).transpose();
        check_point(std::span<const double>(row.data(), row.size()), static_cast<std::size_t>(k), true);
    }
    if (hit_.stop_index) {
        const auto s = static_cast<Eigen::Index>(*hit_.stop_index);
        if (s >= points_.rows()) throw Error(ErrorCode::InvalidArgument, "stop index beyond the grid");
        for (Eigen::Index k = s + 1; k < points_.rows(); ++k) {
            if (points_.row(k) != points_.row(s))
                throw Error(ErrorCode::InvalidArgument, "path is not frozen after its stop index");
        }
    }
}

std::size_t WeightPath::interior_prefix() const noexcept {
    std::size_t k = 0;
    while (k < n_points() && points_.row(static_cast<Eigen::Index>(k)).minCoeff() > 0.0) ++k;
    return k;
}

CapPath::CapPath(TimeGrid grid, Mat caps) : grid_(grid), caps_(std::move(caps)) {
    if (static_cast<std::size_t>(caps_.rows()) != grid_.n_points())
        throw Error(ErrorCode::GridMismatch, "capitalization row count does not match the grid");
    for (Eigen::Index k = 0; k < caps_.rows(); ++k) {
        for (Eigen::Index i = 0; i < caps_.cols(); ++i) {
            if (!(caps_(k, i) > 0.0) || !std::isfinite(caps_(k, i))) {
                std::ostringstream os;
                os << "row " << k << ", column " << i << " has capitalization " << caps_(k, i);
                throw Error(ErrorCode::NonpositiveCap, os.str());
            }
        }
    }
}

namespace {
void check_hyperplane(std::span<const double> x) {
    if (x.size() != 3) throw Error(ErrorCode::InvalidArgument, "radial function is defined for d = 3 only");
    const double sum = x[0] + x[1] + x[2];
    if (!(std::abs(sum - 1.0) <= kSimplexTol)) {
        std::ostringstream os;
        os.precision(17);
        os << "sum = " << sum;
        throw Error(ErrorCode::NotOnHyperplane, os.str());
    }
}
}  // namespace

double radial_r(std::span<const double> x) {
    check_hyperplane(x);
    return radial_r_unchecked(x.data());
}

double radial_r_centered(std::span<const double> x) {
    check_hyperplane(x);
    double s = 0.0;
    for (double xi : x) s += (xi - 1.0 / 3.0) * (xi - 1.0 / 3.0);
    return s;
}

WeightPath weights_from_caps(const CapPath& caps) {
    const Mat& c = caps.caps();
    Mat w(c.rows(), c.cols());
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
        const double total = c.row(k).sum();
        for (Eigen::Index i = 0; i < c.cols(); ++i) w(k, i) = c(k, i) / total;
    }
    return WeightPath(caps.grid(), std::move(w));
}

}  // namespace spt
