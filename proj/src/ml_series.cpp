// Power-series evaluation of E_{alpha,beta}(z), in double or in MPFR when the
// alternating terms cancel beyond double precision.

#include <cmath>
#include <limits>

#include "fracorder/gamma.hpp"
#include "fracorder/mittag_leffler.hpp"
#include "mp_real.hpp"

namespace fracorder {

namespace {

using detail::MpReal;

constexpr int kMaxSeriesTerms = 200000;
constexpr double kLn2 = 0.69314718055994530942;

template <class Real>
struct Arith;

template <>
struct Arith<double> {
    static double make(double v, long) { return v; }
    static double recip_gamma(double x) {
        return x < 170.0 ? rgamma(x) : std::exp(-log_gamma(x));
    }
    static double to_double(double x) { return x; }
};

template <>
struct Arith<MpReal> {
    static MpReal make(double v, long bits) { return MpReal(v, bits); }
    static MpReal recip_gamma(const MpReal& x) {
        MpReal neg = MpReal(0.0, x.precision()) - log_gamma(x);
        return exp(neg);
    }
    static double to_double(const MpReal& x) { return x.to_double(); }
};

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct SeriesOutcome {
    Complex value;
    double remainder = 0.0;
    double log_abs_terms = -std::numeric_limits<double>::infinity();  // log sum |t_k|
    int terms = 0;
    bool overflow = false;
};

template <class Real>
SeriesOutcome sum_series(double alpha, double beta, Complex z, double tol, long bits) {
    using A = Arith<Real>;
    const double unit_roundoff = std::ldexp(1.0, -static_cast<int>(bits));
    const Real zr = A::make(z.real(), bits);
    const Real zi = A::make(z.imag(), bits);
    const Real a = A::make(alpha, bits);
    const Real b = A::make(beta, bits);
    Real pr = A::make(1.0, bits);
    Real pi = A::make(0.0, bits);
    Real sr = A::make(0.0, bits);
    Real si = A::make(0.0, bits);
    const double log_abs_z = std::log(std::abs(z));

    SeriesOutcome out;
    int power_exp = 0;  // z^k = (pr + i pi) 2^power_exp in double precision
    double lg = log_gamma(beta);
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        const double log_term = (k == 0 ? 0.0 : k * log_abs_z) - lg;
        if constexpr (std::is_same_v<Real, double>) {
            if (log_term > 700.0) {
                out.overflow = true;
                return out;
            }
        }
        const Real x = a * A::make(static_cast<double>(k), bits) + b;
        const Real g = A::recip_gamma(x);
        if constexpr (std::is_same_v<Real, double>) {
            const double gn = power_exp == 0 ? g : std::exp(-log_gamma(x) + power_exp * kLn2);
            sr += pr * gn;
            si += pi * gn;
        } else {
            sr += pr * g;
            si += pi * g;
        }
        out.log_abs_terms = log_add(out.log_abs_terms, log_term);

        // Ratio |t_{k+1}/t_k| = |z| Gamma(x)/Gamma(x + alpha) decreases in k (log-convexity of
        // Gamma), so the tail is dominated by a geometric series once the ratio drops below one.
        const double lg_next = log_gamma(alpha * (k + 1) + beta);
        const double log_ratio = log_abs_z + lg - lg_next;
        if (log_ratio < 0.0) {
            const double log_rem = log_term + log_ratio - std::log1p(-std::exp(log_ratio));
            const double abs_sum = std::hypot(A::to_double(sr), A::to_double(si));
            const double noise = std::log(unit_roundoff) + out.log_abs_terms;
            if (log_rem <= std::log(tol) + std::log(abs_sum) || log_rem <= noise) {
                out.value = Complex(A::to_double(sr), A::to_double(si));
                out.remainder = std::exp(log_rem);
                out.terms = k + 1;
                return out;
            }
        }
        Real npr = pr * zr - pi * zi;
        Real npi = pr * zi + pi * zr;
        pr = std::move(npr);
        pi = std::move(npi);
        if constexpr (std::is_same_v<Real, double>) {
            const double mag = std::max(std::abs(pr), std::abs(pi));
            if (mag > 0x1p512) {
                pr = std::ldexp(pr, -512);
                pi = std::ldexp(pi, -512);
                power_exp += 512;
            }
        }
        lg = lg_next;
    }
    fail(ErrorKind::NonConvergence, "Mittag-Leffler series did not meet its remainder bound within " +
                                        std::to_string(kMaxSeriesTerms) + " terms");
}

// max_k [k log|z| - log Gamma(alpha k + beta)]; the objective is concave in k.
double series_log_peak(double alpha, double beta, double abs_z) {
    const double log_abs_z = std::log(abs_z);
    auto f = [&](double k) { return k * log_abs_z - log_gamma(alpha * k + beta); };
    double hi = 16.0;
    while (f(2.0 * hi) > f(hi)) {
        hi *= 2.0;
        if (hi > 1e8)
            fail(ErrorKind::NonConvergence, "series peak lies beyond any feasible term budget");
    }
    double lo = 0.0;
    hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2)) lo = m1; else hi = m2;
    }
    return std::max(0.0, f(0.5 * (lo + hi)));
}

void validate_series_args(double alpha, double beta, Complex z, double tol) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        fail(ErrorKind::InvalidArgument, "series requires alpha > 0 and beta > 0");
    if (!is_finite(z)) fail(ErrorKind::InvalidArgument, "non-finite argument z");
    if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "series tolerance must be positive");
}

}  // namespace

MLEvaluation ml_series_double(double alpha, double beta, Complex z, double tol) {
    validate_series_args(alpha, beta, z, tol);
    if (z == Complex(0.0)) return {Complex(rgamma(beta)), 0.0, MLRegime::Exact, 1, 53};
    const SeriesOutcome s = sum_series<double>(alpha, beta, z, tol, 53);
    if (s.overflow)
        fail(ErrorKind::NonConvergence, "series terms overflow double precision");
    MLEvaluation out;
    out.value = s.value;
    out.error_estimate = s.remainder + std::ldexp(std::exp(s.log_abs_terms), -53);
    out.regime = MLRegime::Series;
    out.work = s.terms;
    out.precision_bits = 53;
    return out;
}

MLEvaluation ml_series(double alpha, double beta, Complex z, double tol,
                       const MLRegimePolicy& policy) {
    validate_series_args(alpha, beta, z, tol);
    if (std::abs(z) > 2.0 * policy.series_radius)
        fail(ErrorKind::InvalidArgument,
             "series evaluation requested beyond twice the series radius");
    if (z == Complex(0.0)) return {Complex(rgamma(beta)), 0.0, MLRegime::Exact, 1, 53};

    const SeriesOutcome d = sum_series<double>(alpha, beta, z, tol, 53);
    long bits = 0;
    if (!d.overflow) {
        const double roundoff = std::ldexp(std::exp(d.log_abs_terms), -53);
        if (roundoff <= tol * std::abs(d.value)) {
            return {d.value, d.remainder + roundoff, MLRegime::Series, d.terms, 53};
        }
        const double log2_ratio = (d.log_abs_terms - std::log(std::abs(d.value) + 1e-300)) / kLn2;
        bits = 16 + static_cast<long>(std::ceil(log2_ratio - std::log2(tol)));
    } else {
        bits = 64 + static_cast<long>(std::ceil(series_log_peak(alpha, beta, std::abs(z)) / kLn2 -
                                                std::log2(tol)));
    }
    bits = std::max(bits, 64L);

    for (int attempt = 0; attempt < 6; ++attempt) {
        const SeriesOutcome s = sum_series<MpReal>(alpha, beta, z, tol, bits);
        const double roundoff = std::ldexp(std::exp(s.log_abs_terms), -static_cast<int>(bits));
        if (roundoff <= tol * std::abs(s.value)) {
            return {s.value, s.remainder + roundoff, MLRegime::ExtendedSeries, s.terms,
                    static_cast<int>(bits)};
        }
        const double log2_ratio = (s.log_abs_terms - std::log(std::abs(s.value) + 1e-300)) / kLn2;
        bits = std::max(2 * bits, 16 + static_cast<long>(std::ceil(log2_ratio - std::log2(tol))));
    }
    fail(ErrorKind::NonConvergence, "series cancellation not resolved by extended precision");
}

}  // namespace fracorder
