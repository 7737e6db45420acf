#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace spt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
    NegativeWeight,
    SumNotOne,
    NotOnHyperplane,
    BoundaryEvaluation,
    AtNavel,
    NonpositiveL,
    NonpositiveWeight,
    GridMismatch,
    GeneratorNearZero,
    Mu1NearZero,
    SpecViolation,
    AtNode,
    NotSymmetric,
    ParseError,
    NonpositiveCap,
    NonuniformGrid,
    GridTooCoarse,
    UnknownModel,
    UnknownGenerator,
    ConfigError,
    IOError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace spt
