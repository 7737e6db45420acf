#include "spt/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace spt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << "line " << line << ": " << what;
    throw Error(code, os.str());
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t col) {
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != end)
        fail(ErrorCode::ParseError, line, "column " + std::to_string(col + 1) + " is not a number: '" + cell + "'");
    return v;
}

}  // namespace

CapPath read_caps(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto head = split_csv(line);
        if (head.size() < 3 || head[0] != "t")
            fail(ErrorCode::ParseError, lineno, "header must be t,S1,...,Sd with d >= 2");
        width = head.size();
        break;
    }
    if (width == 0) fail(ErrorCode::ParseError, lineno, "missing header");

    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != width)
            fail(ErrorCode::ParseError, lineno,
                 "expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()));
        std::vector<double> caps(width - 1);
        const double t = parse_cell(cells[0], lineno, 0);
        for (std::size_t j = 1; j < width; ++j) {
            caps[j - 1] = parse_cell(cells[j], lineno, j);
            if (!(caps[j - 1] > 0.0) || !std::isfinite(caps[j - 1]))
                fail(ErrorCode::NonpositiveCap, lineno, "column " + std::to_string(j + 1) + " is not a positive capitalization");
        }
        if (!times.empty() && !(t > times.back())) fail(ErrorCode::NonuniformGrid, lineno, "times must increase");
        times.push_back(t);
        rows.push_back(std::move(caps));
        lines.push_back(lineno);
    }
    if (rows.size() < 2) fail(ErrorCode::ParseError, lineno, "need at least two data rows");

    const std::size_t n = rows.size() - 1;
    const double dt = (times.back() - times.front()) / static_cast<double>(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double step = times[k] - times[k - 1];
        if (std::abs(step - dt) > 1e-6 * dt) {
            std::ostringstream os;
            os << "step " << step << " differs from the grid step " << dt;
            fail(ErrorCode::NonuniformGrid, lines[k], os.str());
        }
    }
    if (dt > kMaxIngestDt * (1.0 + 1e-6)) {
        std::ostringstream os;
        os << "grid step " << dt << " is coarser than monthly";
        fail(ErrorCode::GridTooCoarse, lines[1], os.str());
    }
    Mat caps(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t j = 0; j + 1 < width; ++j) caps(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = rows[k][j];
    return CapPath(TimeGrid::make(times.front(), dt, n), std::move(caps));
}

CapPath read_caps(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::IOError, "cannot open " + file);
    return read_caps(in);
}

void write_caps_csv(std::ostream& os, const WeightPath& path) {
    os << 't';
    for (std::size_t i = 1; i <= path.dim(); ++i) os << ",S" << i;
    os << '\n';
    os.precision(17);
    for (std::size_t k = 0; k < path.n_points(); ++k) {
        os << path.grid().time(k);
        for (std::size_t i = 0; i < path.dim(); ++i) os << ',' << path.weight(k, i);
        os << '\n';
    }
}

EmpiricalGammaH empirical_gamma_H(const CapPath& caps) {
    EmpiricalGammaH out;
    out.gamma = gamma_H_weighted(weights_from_caps(caps));
    out.total = out.gamma.final();
    const double span = caps.grid().horizon() - caps.grid().t0;
    out.eta_hat = out.total / span;
    out.eta_checked = 0.9 * out.eta_hat;
    out.slope_check = slope_monotone_check(out.gamma, out.eta_checked, span);
    return out;
}

}  // namespace spt
