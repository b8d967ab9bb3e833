#include "fracorder/mittag_leffler.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "fracorder/gamma.hpp"

namespace fracorder {

namespace {

constexpr int kGaussOrder = 16;
constexpr int kMaxRefinements = 12;
// Ray truncation: exp(-c u) u^k below ~1e-18.
constexpr double kRayDecayLog = 41.5;

struct GaussRule {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

GaussRule make_gauss_rule() {
    GaussRule rule;
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss_rule() {
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

template <class F>
Complex composite_gauss(F&& f, double a, double b, int panels) {
    const GaussRule& rule = gauss_rule();
    const double h = (b - a) / panels;
    Complex sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        Complex panel = 0.0;
        for (int i = 0; i < kGaussOrder; ++i) panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        sum += 0.5 * h * panel;
    }
    return sum;
}

// exp(zeta^{1/alpha}) zeta^q / (zeta - z) at zeta = rho e^{i phi}, principal branches.
Complex hankel_integrand(double alpha, double q, Complex z, double rho, double phi) {
    const double root = std::pow(rho, 1.0 / alpha);
    const double log_mag = root * std::cos(phi / alpha) + q * std::log(rho);
    const double phase = root * std::sin(phi / alpha) + q * phi;
    const Complex zeta = std::polar(rho, phi);
    return std::polar(std::exp(log_mag), phase) / (zeta - z);
}

double ray_length(double alpha, double theta, double q, double radius) {
    const double c = -std::cos(theta / alpha);
    double u = kRayDecayLog / c;
    for (int it = 0; it < 50; ++it) {
        const double next = (kRayDecayLog + std::max(0.0, alpha * (q + 1.0)) * std::log(u)) / c;
        if (std::abs(next - u) < 1e-9 * u) break;
        u = next;
    }
    return std::max(std::pow(u, alpha), 2.0 * radius);
}

double wrapped_abs_arg(Complex z) { return std::abs(std::arg(z)); }

void validate_order_args(double alpha, double beta, Complex z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        fail(ErrorKind::InvalidArgument, "Mittag-Leffler index alpha must lie in (0, 1]");
    if (!(beta > 0.0) || !std::isfinite(beta))
        fail(ErrorKind::InvalidArgument, "Mittag-Leffler parameter beta must be positive");
    if (!is_finite(z)) fail(ErrorKind::InvalidArgument, "non-finite argument z");
}

MLEvaluation checked(MLEvaluation e, Complex z, double beta) {
    // Real axis in, real axis out: drop quadrature noise in the imaginary part.
    if (z.imag() == 0.0 && std::isfinite(beta)) e.value = Complex(e.value.real(), 0.0);
    if (!is_finite(e.value))
        fail(ErrorKind::NonFinite, "Mittag-Leffler value is not finite (overflow)");
    return e;
}

// Series in double if it is cheap and well conditioned, nullopt otherwise.
std::optional<MLEvaluation> try_double_series(double alpha, double beta, Complex z,
                                              const MLRegimePolicy& policy) {
    const double r = std::abs(z);
    if (r > policy.series_radius) return std::nullopt;
    try {
        MLEvaluation s = ml_series_double(alpha, beta, z, policy.series_tol);
        const double ratio = s.error_estimate / (std::ldexp(1.0, -53) * std::abs(s.value));
        if (r <= 1.0 || ratio <= policy.series_cancellation_limit) return s;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonConvergence) throw;
        if (r <= 1.0) throw;
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(MLRegime regime) {
    switch (regime) {
        case MLRegime::Exact: return "exact";
        case MLRegime::Exponential: return "exponential";
        case MLRegime::Series: return "series";
        case MLRegime::ExtendedSeries: return "series-mp";
        case MLRegime::Contour: return "contour";
    }
    return "unknown";
}

void MLRegimePolicy::validate() const {
    if (!(series_radius >= 1.0)) fail(ErrorKind::InvalidArgument, "series_radius must be >= 1");
    if (!(series_tol > 0.0)) fail(ErrorKind::InvalidArgument, "series_tol must be positive");
    if (contour_nodes < 64) fail(ErrorKind::InvalidArgument, "contour_nodes must be >= 64");
    if (!(contour_epsilon_fraction > 0.0 && contour_epsilon_fraction < 1.0))
        fail(ErrorKind::InvalidArgument, "contour_epsilon_fraction must lie in (0, 1)");
    if (!(contour_tol > 0.0)) fail(ErrorKind::InvalidArgument, "contour_tol must be positive");
}

double contour_epsilon(Complex lambda, double fraction) {
    const double margin = wrapped_abs_arg(lambda) - kPi / 2.0;
    return fraction * 0.5 * std::min(margin, kPi / 2.0);
}

HankelContour observation_contour(double rho, Complex lambda, Complex z,
                                  const MLRegimePolicy& policy, int extracted_terms) {
    HankelContour c;
    c.theta = (kPi / 2.0 + contour_epsilon(lambda, policy.contour_epsilon_fraction)) * rho;
    c.radius = std::abs(z) >= 2.0 ? 1.0 : 0.5 * std::abs(z);
    c.node_count = policy.contour_nodes;
    c.extracted_terms = extracted_terms;
    c.tol = policy.contour_tol;
    return c;
}

HankelContour contour_for(double alpha, Complex z, const MLRegimePolicy& policy) {
    const double phi = wrapped_abs_arg(z);
    HankelContour c;
    c.radius = std::abs(z) >= 2.0 ? 1.0 : 0.5 * std::abs(z);
    c.node_count = policy.contour_nodes;
    c.extracted_terms = 2;
    c.tol = policy.contour_tol;
    const double lower = kPi * alpha / 2.0;
    const double upper = std::min(kPi, kPi * alpha);
    const double left_hi = std::min(phi, upper);
    const double right_lo = std::max(phi, lower);
    if (left_hi - lower >= upper - right_lo) {
        c.theta = lower + 0.5 * (left_hi - lower);
    } else {
        c.theta = right_lo + 0.5 * (upper - right_lo);
        c.allow_residue = true;
    }
    return c;
}

MLEvaluation ml_contour(double alpha, double beta, Complex z, const HankelContour& contour) {
    validate_order_args(alpha, beta, z);
    const double theta = contour.theta;
    const double r = contour.radius;
    if (!(theta > kPi * alpha / 2.0) || !(theta < kPi) || !(theta / alpha < 1.5 * kPi))
        fail(ErrorKind::ContourViolation, "contour angle theta outside (pi alpha/2, min(pi, 3 pi alpha/2))");
    if (!(r > 0.0)) fail(ErrorKind::ContourViolation, "contour radius must be positive");
    if (std::abs(z) < 1.0) fail(ErrorKind::ContourViolation, "contour evaluation requires |z| >= 1");
    if (contour.node_count < 64) fail(ErrorKind::ContourViolation, "contour needs at least 64 nodes");
    if (contour.extracted_terms < 0) fail(ErrorKind::ContourViolation, "negative extracted_terms");

    const double phi = wrapped_abs_arg(z);
    const double angle_gap = phi - theta;
    bool right_side = false;
    if (angle_gap <= 1e-9) {
        if (!contour.allow_residue || angle_gap > -1e-9 || std::abs(z) < r * (1.0 + 1e-6)) {
            std::ostringstream msg;
            msg << "z = " << z << " is not to the left of the Hankel path (|arg z| = " << phi
                << ", theta = " << theta << ")";
            fail(ErrorKind::ContourViolation, msg.str());
        }
        right_side = true;
    }

    const int p = contour.extracted_terms;
    const double q = (1.0 - beta) / alpha + p;

    Complex explicit_part = 0.0;
    double explicit_scale = 0.0;
    Complex zinv_pow = 1.0;
    for (int k = 1; k <= p; ++k) {
        zinv_pow /= z;
        const Complex term = -zinv_pow * rgamma(beta - alpha * k);
        explicit_part += term;
        explicit_scale += std::abs(term);
    }
    if (right_side) {
        const Complex residue =
            std::exp(std::pow(z, 1.0 / alpha)) * std::pow(z, (1.0 - beta) / alpha) / alpha;
        explicit_part += residue;
        explicit_scale += std::abs(residue);
    }
    const Complex prefactor = 1.0 / (Complex(0.0, 2.0 * kPi) * alpha * std::pow(z, p));

    const double ray_end = ray_length(alpha, theta, q, r);
    const Complex up = std::polar(1.0, theta);
    const Complex down = std::polar(1.0, -theta);
    auto upper_ray = [&](double s) { return hankel_integrand(alpha, q, z, s, theta) * up; };
    auto lower_ray = [&](double s) { return -hankel_integrand(alpha, q, z, s, -theta) * down; };
    auto arc = [&](double y) {
        return hankel_integrand(alpha, q, z, r, y) * Complex(0.0, 1.0) * std::polar(r, y);
    };

    const int base_panels = std::max(3, contour.node_count / kGaussOrder);
    const int base_arc = std::max(1, base_panels / 4);
    const int base_ray = std::max(1, (base_panels - base_arc) / 2);
    auto integrate = [&](int level) {
        const int ray_panels = base_ray << level;
        const int arc_panels = base_arc << level;
        return composite_gauss(upper_ray, r, ray_end, ray_panels) +
               composite_gauss(lower_ray, r, ray_end, ray_panels) +
               composite_gauss(arc, -theta, theta, arc_panels);
    };

    Complex previous = integrate(0);
    int nodes = (2 * base_ray + base_arc) * kGaussOrder;
    for (int level = 1; level <= kMaxRefinements; ++level) {
        const Complex current = integrate(level);
        nodes += (2 * base_ray + base_arc) * kGaussOrder << level;
        const Complex value = explicit_part + prefactor * current;
        const double delta = std::abs(prefactor * (current - previous));
        const double scale = explicit_scale + std::abs(prefactor * current);
        if (!is_finite(value)) fail(ErrorKind::NonFinite, "Hankel-path quadrature overflowed");
        if (delta <= contour.tol * scale) {
            return {value, delta, MLRegime::Contour, nodes, 53};
        }
        previous = current;
    }
    std::ostringstream msg;
    msg << "Hankel-path quadrature did not stabilize for alpha=" << alpha << ", beta=" << beta
        << ", z=" << z;
    fail(ErrorKind::QuadratureFailure, msg.str());
}

MLEvaluation ml_evaluate(double alpha, double beta, Complex z, const MLRegimePolicy& policy) {
    validate_order_args(alpha, beta, z);
    if (z == Complex(0.0)) {
        return {Complex(beta == 1.0 ? 1.0 : rgamma(beta)), 0.0, MLRegime::Exact, 0, 53};
    }
    if (alpha == 1.0 && beta == 1.0) return checked({std::exp(z), 0.0, MLRegime::Exponential, 0, 53}, z, beta);
    if (auto s = try_double_series(alpha, beta, z, policy)) return checked(*s, z, beta);
    return checked(ml_contour(alpha, beta, z, contour_for(alpha, z, policy)), z, beta);
}

void require_spectral_condition(Complex lambda, std::optional<int> index) {
    if (!(wrapped_abs_arg(lambda) > kPi / 2.0 + 1e-12) || !is_finite(lambda)) {
        std::ostringstream msg;
        msg << "eigenvalue " << lambda << " violates |arg lambda| > pi/2 (|arg| = "
            << wrapped_abs_arg(lambda) << ")";
        fail(ErrorKind::SpectralConditionViolation, msg.str(), index);
    }
}

namespace {

void validate_map_args(double rho, Complex lambda, double t0) {
    if (!(rho > 0.0 && rho <= 1.0)) fail(ErrorKind::InvalidArgument, "order rho must lie in (0, 1]");
    if (!(t0 >= 1.0) || !std::isfinite(t0))
        fail(ErrorKind::InvalidTime, "observation time t0 must be finite and >= 1");
    require_spectral_condition(lambda);
}

// E_{rho,beta}(lambda t0^rho) with the contour angle tied to lambda.
MLEvaluation observation_value(double rho, double beta, Complex lambda, double t0,
                               const MLRegimePolicy& policy, int extracted_terms) {
    const Complex z = lambda * std::pow(t0, rho);
    if (rho == 1.0 && beta == 1.0)
        return checked({std::exp(lambda * t0), 0.0, MLRegime::Exponential, 0, 53}, z, beta);
    if (auto s = try_double_series(rho, beta, z, policy)) return checked(*s, z, beta);
    return checked(ml_contour(rho, beta, z, observation_contour(rho, lambda, z, policy, extracted_terms)),
                   z, beta);
}

}  // namespace

Complex e1_caputo(double rho, Complex lambda, double t0, const MLRegimePolicy& policy) {
    validate_map_args(rho, lambda, t0);
    return observation_value(rho, 1.0, lambda, t0, policy, 1).value;
}

Complex e2_rl(double rho, Complex lambda, double t0, const MLRegimePolicy& policy) {
    validate_map_args(rho, lambda, t0);
    if (rho == 1.0) {
        const Complex z = lambda * t0;
        return checked({std::exp(z), 0.0, MLRegime::Exponential, 0, 53}, z, 1.0).value;
    }
    return std::pow(t0, rho - 1.0) * observation_value(rho, rho, lambda, t0, policy, 2).value;
}

int rl_sign_factor(Complex lambda) {
    const double diff = std::abs(lambda.real()) - std::abs(lambda.imag());
    if (std::abs(diff) <= 1e-12 * std::abs(lambda)) {
        std::ostringstream msg;
        msg << "|Re lambda| = |Im lambda| for lambda = " << lambda;
        fail(ErrorKind::DegenerateSignCondition, msg.str());
    }
    return diff > 0.0 ? 1 : -1;
}

double r_c(double rho, Complex lambda, double t0, const MLRegimePolicy& policy) {
    return e1_caputo(rho, lambda, t0, policy).real();
}

double r_rl(double rho, Complex lambda, double t0, const MLRegimePolicy& policy) {
    const int sign = rl_sign_factor(lambda);
    return sign * e2_rl(rho, lambda, t0, policy).real();
}

Complex order_map(DerivativeKind kind, double rho, Complex lambda, double t0,
                  const MLRegimePolicy& policy) {
    return kind == DerivativeKind::Caputo ? e1_caputo(rho, lambda, t0, policy)
                                          : e2_rl(rho, lambda, t0, policy);
}

double monotone_map(DerivativeKind kind, double rho, Complex lambda, double t0,
                    const MLRegimePolicy& policy) {
    return kind == DerivativeKind::Caputo ? r_c(rho, lambda, t0, policy)
                                          : r_rl(rho, lambda, t0, policy);
}

SignedLog monotone_map_log(DerivativeKind kind, double rho, Complex lambda, double t0,
                           const MLRegimePolicy& policy) {
    const int sign_factor = kind == DerivativeKind::Caputo ? 1 : rl_sign_factor(lambda);
    if (rho == 1.0) {
        validate_map_args(rho, lambda, t0);
        // Re e^{lambda t0} = e^{Re(lambda) t0} cos(Im(lambda) t0), identical for both kinds.
        const double c = std::cos(lambda.imag() * t0);
        if (c == 0.0) return {};
        return {sign_factor * (c > 0.0 ? 1 : -1), lambda.real() * t0 + std::log(std::abs(c))};
    }
    const double v = monotone_map(kind, rho, lambda, t0, policy);
    if (v == 0.0) return {};
    return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
}

}  // namespace fracorder
