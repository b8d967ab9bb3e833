#include "fracorder/core.hpp"

namespace fracorder {

std::string to_string(DerivativeKind kind) {
    return kind == DerivativeKind::Caputo ? "caputo" : "rl";
}

DerivativeKind parse_derivative_kind(const std::string& text) {
    if (text == "caputo") return DerivativeKind::Caputo;
    if (text == "rl" || text == "riemann-liouville") return DerivativeKind::RiemannLiouville;
    fail(ErrorKind::InvalidArgument, "unknown derivative kind '" + text + "' (expected caputo|rl)");
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::ContourViolation: return "ContourViolation";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::SpectralConditionViolation: return "SpectralConditionViolation";
        case ErrorKind::DegenerateSignCondition: return "DegenerateSignCondition";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::NonSymmetric: return "NonSymmetric";
        case ErrorKind::NotDiagonalizable: return "NotDiagonalizable";
        case ErrorKind::DegenerateEigenvalues: return "DegenerateEigenvalues";
        case ErrorKind::InvalidTime: return "InvalidTime";
        case ErrorKind::SingularK: return "SingularK";
        case ErrorKind::RangeViolation: return "RangeViolation";
        case ErrorKind::InconsistentData: return "InconsistentData";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::NoMonotoneTime: return "NoMonotoneTime";
        case ErrorKind::ScenarioError: return "ScenarioError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {
std::string decorate(ErrorKind kind, const std::string& message, std::optional<int> index) {
    std::string out = to_string(kind);
    if (index) out += "[l=" + std::to_string(*index + 1) + "]";
    out += ": " + message;
    return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<int> index)
    : std::runtime_error(decorate(kind, message, index)), kind_(kind), detail_(message), index_(index) {}

void fail(ErrorKind kind, const std::string& message, std::optional<int> index) {
    throw Error(kind, message, index);
}

}  // namespace fracorder
