#ifndef FRACORDER_GAMMA_HPP
#define FRACORDER_GAMMA_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <limits>

namespace fracorder {

namespace detail {

// Lanczos approximation, g = 7, nine terms (Godfrey's coefficients).
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993227684700473478,  676.520368121885098567009190444019,
    -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
    -176.61502916214059906584551354,     12.507343278686904814458936853,
    -0.13857109526572011689554707,       9.984369578019570859563e-6,
    1.50563273514931155834e-7};

inline constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;

template <std::floating_point Real>
Real lanczos_series(Real x) {
    // x is the shifted argument (Gamma(x + 1) form).
    Real sum = static_cast<Real>(kLanczosCoef[0]);
    for (std::size_t i = 1; i < kLanczosCoef.size(); ++i)
        sum += static_cast<Real>(kLanczosCoef[i]) / (x + static_cast<Real>(i));
    return sum;
}

}  // namespace detail

/// sin(pi x) with exact zeros at the integers.
template <std::floating_point Real>
Real sin_pi(Real x) {
    if (x == std::floor(x)) return Real(0);
    Real r = std::fmod(x, Real(2));
    if (r < Real(0)) r += Real(2);
    if (r > Real(1)) return -sin_pi(r - Real(1));
    if (r > Real(0.5)) r = Real(1) - r;
    return std::sin(static_cast<Real>(3.14159265358979323846264338327950288L) * r);
}

/// Euler's Gamma function on the real line; poles return +-infinity.
template <std::floating_point Real>
Real gamma(Real x) {
    constexpr Real pi = static_cast<Real>(3.14159265358979323846264338327950288L);
    if (std::isnan(x)) return x;
    if (x <= Real(0) && x == std::floor(x)) return std::numeric_limits<Real>::infinity();
    if (x < Real(0.5)) return pi / (sin_pi(x) * gamma(Real(1) - x));
    if (x == std::floor(x) && x <= Real(23)) {
        Real f = Real(1);
        for (int k = 2; k < static_cast<int>(x); ++k) f *= Real(k);
        return f;
    }
    const Real xm = x - Real(1);
    const Real t = xm + static_cast<Real>(detail::kLanczosG) + Real(0.5);
    // Split the power to delay overflow for large arguments.
    const Real half_pow = std::pow(t, (xm + Real(0.5)) / Real(2));
    return std::sqrt(Real(2) * pi) * half_pow * (half_pow * std::exp(-t)) *
           detail::lanczos_series(xm);
}

/// 1/Gamma(x); exactly zero at the poles 0, -1, -2, ...
template <std::floating_point Real>
Real rgamma(Real x) {
    constexpr Real pi = static_cast<Real>(3.14159265358979323846264338327950288L);
    if (x <= Real(0) && x == std::floor(x)) return Real(0);
    if (x < Real(0.5)) return sin_pi(x) * gamma(Real(1) - x) / pi;
    return Real(1) / gamma(x);
}

/// log Gamma(x) for x > 0.
template <std::floating_point Real>
Real log_gamma(Real x) {
    if (x < Real(0.5)) {
        constexpr Real pi = static_cast<Real>(3.14159265358979323846264338327950288L);
        return std::log(pi / std::abs(sin_pi(x))) - log_gamma(Real(1) - x);
    }
    const Real xm = x - Real(1);
    const Real t = xm + static_cast<Real>(detail::kLanczosG) + Real(0.5);
    return static_cast<Real>(detail::kHalfLogTwoPi) + (xm + Real(0.5)) * std::log(t) - t +
           std::log(detail::lanczos_series(xm));
}

}  // namespace fracorder

#endif  // FRACORDER_GAMMA_HPP
