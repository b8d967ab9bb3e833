#ifndef FRACORDER_MITTAG_LEFFLER_HPP
#define FRACORDER_MITTAG_LEFFLER_HPP

#include <cmath>
#include <limits>

#include "fracorder/core.hpp"

namespace fracorder {

/// Knobs for the regime-dispatching evaluators.
struct MLRegimePolicy {
    double series_radius = 5.0;
    double series_tol = 1e-15;
    int contour_nodes = 128;
    double contour_epsilon_fraction = 0.9;
    double contour_tol = 1e-12;
    /// Largest |term| / |sum| the dispatcher tolerates before preferring the contour.
    double series_cancellation_limit = 1e3;

    void validate() const;
};

enum class MLRegime { Exact, Exponential, Series, ExtendedSeries, Contour };

const char* to_string(MLRegime regime);

struct MLEvaluation {
    Complex value;
    double error_estimate = 0.0;
    MLRegime regime = MLRegime::Exact;
    int work = 0;            // series terms or quadrature nodes
    int precision_bits = 53; // working precision of the series
};

/// Hankel path delta(radius; theta): two rays |zeta| >= radius at arg = +-theta joined by the arc.
struct HankelContour {
    double radius = 1.0;
    double theta = 0.0;
    int node_count = 128;
    /// Number of terms -sum_k z^{-k}/Gamma(beta - alpha k) split off before integrating.
    int extracted_terms = 1;
    /// Accept z to the right of the path by adding the residue term.
    bool allow_residue = false;
    double tol = 1e-12;
};

/// epsilon = fraction * 1/2 * min(|arg lambda| - pi/2, pi/2).
double contour_epsilon(Complex lambda, double fraction);

/// theta = (pi/2 + epsilon) rho with epsilon from contour_epsilon; radius shrinks below |z| = 2.
HankelContour observation_contour(double rho, Complex lambda, Complex z,
                                  const MLRegimePolicy& policy, int extracted_terms);

/// A valid path for arbitrary z (left of the path when |arg z| > pi/2).
HankelContour contour_for(double alpha, Complex z, const MLRegimePolicy& policy);

/// Power series sum z^k / Gamma(alpha k + beta); escalates to multiprecision on cancellation.
MLEvaluation ml_series(double alpha, double beta, Complex z, double tol,
                       const MLRegimePolicy& policy = {});

/// Same series in double precision only (no escalation); throws NonConvergence on overflow.
MLEvaluation ml_series_double(double alpha, double beta, Complex z, double tol);

/// Integral representation over the Hankel path.
MLEvaluation ml_contour(double alpha, double beta, Complex z, const HankelContour& contour);

MLEvaluation ml_evaluate(double alpha, double beta, Complex z, const MLRegimePolicy& policy = {});

inline Complex ml_two(double alpha, double beta, Complex z, const MLRegimePolicy& policy = {}) {
    return ml_evaluate(alpha, beta, z, policy).value;
}

inline Complex ml_one(double beta, Complex z, const MLRegimePolicy& policy = {}) {
    return ml_evaluate(beta, 1.0, z, policy).value;
}

/// E_rho(lambda t0^rho).
Complex e1_caputo(double rho, Complex lambda, double t0, const MLRegimePolicy& policy = {});

/// t0^{rho-1} E_{rho,rho}(lambda t0^rho).
Complex e2_rl(double rho, Complex lambda, double t0, const MLRegimePolicy& policy = {});

/// sign(|Re lambda| - |Im lambda|); DegenerateSignCondition when the two coincide.
int rl_sign_factor(Complex lambda);

double r_c(double rho, Complex lambda, double t0, const MLRegimePolicy& policy = {});
double r_rl(double rho, Complex lambda, double t0, const MLRegimePolicy& policy = {});

/// e1_caputo or e2_rl by kind.
Complex order_map(DerivativeKind kind, double rho, Complex lambda, double t0,
                  const MLRegimePolicy& policy = {});

/// r_c or r_rl by kind.
double monotone_map(DerivativeKind kind, double rho, Complex lambda, double t0,
                    const MLRegimePolicy& policy = {});

/// A real number stored as sign * exp(log_abs); survives the underflow of e^{lambda t0}.
struct SignedLog {
    int sign = 0;
    double log_abs = -std::numeric_limits<double>::infinity();

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// monotone_map in sign/log form; rho = 1 uses the closed form e^{Re(lambda) t0} cos(Im(lambda) t0).
SignedLog monotone_map_log(DerivativeKind kind, double rho, Complex lambda, double t0,
                           const MLRegimePolicy& policy = {});

void require_spectral_condition(Complex lambda, std::optional<int> index = std::nullopt);

}  // namespace fracorder

#endif  // FRACORDER_MITTAG_LEFFLER_HPP
