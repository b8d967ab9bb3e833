#ifndef FRACORDER_CORE_HPP
#define FRACORDER_CORE_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fracorder {

using Complex = std::complex<double>;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

enum class DerivativeKind { Caputo, RiemannLiouville };

std::string to_string(DerivativeKind kind);
DerivativeKind parse_derivative_kind(const std::string& text);

/// Every failure the library can signal. The CLI maps each kind onto an exit code.
enum class ErrorKind {
    InvalidArgument,
    NonConvergence,
    ContourViolation,
    QuadratureFailure,
    NonFinite,
    SpectralConditionViolation,
    DegenerateSignCondition,
    OutOfDomain,
    NonSymmetric,
    NotDiagonalizable,
    DegenerateEigenvalues,
    InvalidTime,
    SingularK,
    RangeViolation,
    InconsistentData,
    NoRoot,
    NoMonotoneTime,
    ScenarioError,
    IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<int> index = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    /// Zero-based mode index l the failure refers to, when there is one.
    std::optional<int> index() const noexcept { return index_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
    std::optional<int> index_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message,
                       std::optional<int> index = std::nullopt);

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace fracorder

#endif  // FRACORDER_CORE_HPP
