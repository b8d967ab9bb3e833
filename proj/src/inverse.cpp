#include "fracorder/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

namespace fracorder {

namespace {

// Re-raise an unindexed library error as belonging to mode l.
template <class F>
auto for_mode(int l, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.index()) throw;
        throw Error(e.kind(), e.detail(), l);
    }
}

void validate_floor(double beta0) {
    if (!(beta0 > 0.0 && beta0 < 1.0)) fail(ErrorKind::InvalidArgument, "beta0 must lie in (0, 1)");
}

void validate_time(double t0) {
    if (!(t0 >= 1.0) || !std::isfinite(t0))
        fail(ErrorKind::InvalidTime, "observation time t0 must be finite and >= 1");
}

double norm_inf(const CMatrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }
double norm_one(const CMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

std::string str(Complex z) {
    std::ostringstream s;
    s.precision(6);
    s << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return s.str();
}

}  // namespace

void InverseTolerances::validate() const {
    if (!(beta_tol > 0.0 && beta_tol < 0.5)) fail(ErrorKind::InvalidArgument, "beta_tol must lie in (0, 0.5)");
    if (!(residual_rel > 0.0)) fail(ErrorKind::InvalidArgument, "residual_rel must be positive");
    if (!(det_rel > 0.0)) fail(ErrorKind::InvalidArgument, "det_rel must be positive");
    if (!(max_k_condition > 1.0)) fail(ErrorKind::InvalidArgument, "max_k_condition must exceed 1");
    if (!(range_slack >= 0.0)) fail(ErrorKind::InvalidArgument, "range_slack must be non-negative");
    if (certificate_samples < 2) fail(ErrorKind::InvalidArgument, "certificate_samples must be >= 2");
    if (!(strict_margin >= 0.0)) fail(ErrorKind::InvalidArgument, "strict_margin must be non-negative");
    if (max_doublings < 0 || max_doublings > 60)
        fail(ErrorKind::InvalidArgument, "max_doublings must lie in [0, 60]");
    ml.validate();
}

KMatrix build_k_matrix(const Diagonalization& diag, const CVector& phi, const InverseTolerances& tol) {
    KMatrix out;
    out.k = k_coeff(diag, phi);
    const Eigen::Index m = out.k.rows();
    const Eigen::PartialPivLU<CMatrix> lu(out.k);
    out.det = lu.determinant();
    out.det_tol = tol.det_rel * std::pow(norm_inf(out.k), static_cast<double>(m));
    if (!(std::abs(out.det) > out.det_tol)) {
        std::ostringstream msg;
        msg << "K(xi0, phi(xi0)) is singular (|det K| = " << std::abs(out.det) << " <= " << out.det_tol
            << "); xi0 violates the determinant condition, choose a different xi0";
        fail(ErrorKind::SingularK, msg.str());
    }
    out.condition = norm_one(out.k) * norm_one(lu.inverse());
    out.well_posed = std::isfinite(out.condition) && out.condition < tol.max_k_condition;
    return out;
}

std::vector<ScalarTarget> reduce_targets(const KMatrix& k, const CVector& d, const Diagonalization& diag,
                                         double t0, DerivativeKind kind, double beta0,
                                         const InverseTolerances& tol) {
    validate_floor(beta0);
    validate_time(t0);
    if (!k.well_posed) {
        std::ostringstream msg;
        msg << "K(xi0, phi(xi0)) is ill-conditioned (condition " << k.condition << ", |det| "
            << std::abs(k.det) << "); xi0 violates the determinant condition, choose a different xi0";
        fail(ErrorKind::SingularK, msg.str());
    }
    if (d.size() != k.k.rows() || diag.eigenvalues.size() != k.k.rows())
        fail(ErrorKind::InvalidArgument, "observation, K and symbol sizes differ");
    const CVector b = k.k.partialPivLu().solve(d);

    std::vector<ScalarTarget> out;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        const int l = static_cast<int>(i);
        ScalarTarget s;
        s.index = l;
        s.lambda = diag.eigenvalues(i);
        s.b = b(i);
        s.kind = kind;
        for_mode(l, [&] {
            require_spectral_condition(s.lambda);
            s.sign_factor = kind == DerivativeKind::Caputo ? 1 : rl_sign_factor(s.lambda);
            s.r_one = monotone_map_log(kind, 1.0, s.lambda, t0, tol.ml).value();
            s.r_floor = monotone_map_log(kind, beta0, s.lambda, t0, tol.ml).value();
        });
        if (!is_finite(s.b)) fail(ErrorKind::NonFinite, "K^{-1} d is not finite", l);
        s.slack = tol.range_slack * std::max(std::abs(s.r_one), std::abs(s.r_floor));
        const double y = s.target();
        if (y < s.r_one - s.slack || y > s.r_floor + s.slack) {
            std::ostringstream msg;
            msg.precision(17);
            msg << (kind == DerivativeKind::Caputo ? "Re b" : "sign * Re b") << " = " << y
                << " lies outside the admissible range [R(1), R(beta0)] = [" << s.r_one << ", " << s.r_floor
                << "] for lambda = " << str(s.lambda);
            fail(ErrorKind::RangeViolation, msg.str(), l);
        }
        out.push_back(s);
    }
    return out;
}

MonotonicityCertificate verify_monotonicity(DerivativeKind kind, Complex lambda, double t0, double beta0,
                                            int n_samples, const InverseTolerances& tol) {
    validate_floor(beta0);
    validate_time(t0);
    if (n_samples < 2) fail(ErrorKind::InvalidArgument, "certificate needs at least 2 samples");
    require_spectral_condition(lambda);
    if (kind == DerivativeKind::RiemannLiouville) rl_sign_factor(lambda);

    MonotonicityCertificate c;
    c.samples = n_samples;
    c.lambda = lambda;
    c.t0 = t0;
    c.beta0 = beta0;
    c.kind = kind;

    std::vector<SignedLog> r(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double beta = i == n_samples - 1 ? 1.0 : beta0 + (1.0 - beta0) * i / (n_samples - 1);
        try {
            r[i] = monotone_map_log(kind, beta, lambda, t0, tol.ml);
        } catch (const Error& e) {
            c.first_violation = i;
            c.reason = std::string("evaluation failed: ") + e.what();
            return c;
        }
        if (r[i].sign <= 0) {
            c.first_violation = i;
            c.reason = "R is not positive at beta = " + std::to_string(beta);
            return c;
        }
    }
    c.r_floor = r.front();
    c.r_one = r.back();
    const double ref = r.front().log_abs;
    for (int i = 0; i + 1 < n_samples; ++i) {
        const double drop = std::exp(r[i].log_abs - ref) - std::exp(r[i + 1].log_abs - ref);
        if (!(drop >= tol.strict_margin)) {
            c.first_violation = i + 1;
            c.reason = "R is not strictly decreasing at sample " + std::to_string(i + 1);
            return c;
        }
    }
    c.pass = true;
    return c;
}

OrderRecovery recover_order(const ScalarTarget& target, double t0, double beta0, const InverseTolerances& tol) {
    validate_floor(beta0);
    validate_time(t0);
    const int l = target.index;
    return for_mode(l, [&] {
        require_spectral_condition(target.lambda);
        const DerivativeKind kind = target.kind;
        const int sign = kind == DerivativeKind::Caputo ? 1 : rl_sign_factor(target.lambda);
        auto r = [&](double beta) { return monotone_map_log(kind, beta, target.lambda, t0, tol.ml).value(); };

        const double r_one = r(1.0);
        const double r_floor = r(beta0);
        const double y = sign * target.b.real();
        const double slack = tol.range_slack * std::max(std::abs(r_one), std::abs(r_floor));
        if (!(r_one <= r_floor)) {
            std::ostringstream msg;
            msg << "endpoint values R(1) = " << r_one << " > R(beta0) = " << r_floor << " do not bracket";
            fail(ErrorKind::NoRoot, msg.str());
        }
        if (y < r_one - slack || y > r_floor + slack) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "target " << y << " is not bracketed by [R(1), R(beta0)] = [" << r_one << ", " << r_floor
                << "]";
            fail(ErrorKind::NoRoot, msg.str());
        }

        OrderRecovery out;
        out.index = l;
        double lo = beta0, hi = 1.0;
        if (y >= r_floor) {
            out.beta = beta0;
            out.clamped = y > r_floor;
            hi = beta0;
        } else if (y <= r_one) {
            out.beta = 1.0;
            out.clamped = y < r_one;
            lo = 1.0;
        } else {
            while (hi - lo > tol.beta_tol) {
                const double mid = 0.5 * (lo + hi);
                if (r(mid) > y) lo = mid; else hi = mid;
                ++out.iterations;
            }
            out.beta = 0.5 * (lo + hi);
        }
        out.bracket_lo = lo;
        out.bracket_hi = hi;
        out.at_right_endpoint = hi == 1.0 && 1.0 - out.beta <= tol.beta_tol;

        const Complex e = order_map(kind, out.beta, target.lambda, t0, tol.ml);
        out.real_residual = std::abs(sign * e.real() - y);
        out.complex_residual = std::abs(e - target.b);
        out.residual_tol = tol.residual_rel * (std::min(1.0, std::abs(r_floor)) + std::abs(target.b));
        if (!(out.complex_residual <= out.residual_tol)) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "real part solved at beta = " << out.beta << " but |e(beta) - b| = " << out.complex_residual
                << " exceeds " << out.residual_tol << "; the observation is not consistent with the model";
            fail(ErrorKind::InconsistentData, msg.str());
        }
        return out;
    });
}

double observation_time_start(DerivativeKind kind, double beta0) {
    validate_floor(beta0);
    const double t0 = std::exp(1.0 - kEulerGamma);
    return kind == DerivativeKind::Caputo ? t0 : t0 * std::exp(2.0 / beta0);
}

double suggest_observation_time(DerivativeKind kind, double beta0, const std::vector<Complex>& lambdas,
                                const InverseTolerances& tol) {
    tol.validate();
    if (lambdas.empty()) fail(ErrorKind::InvalidArgument, "no eigenvalues to certify");
    for (std::size_t l = 0; l < lambdas.size(); ++l)
        for_mode(static_cast<int>(l), [&] {
            require_spectral_condition(lambdas[l]);
            if (kind == DerivativeKind::RiemannLiouville) rl_sign_factor(lambdas[l]);
        });
    const double start = observation_time_start(kind, beta0);
    std::string last_reason;
    int last_failing = 0;
    for (int k = 0; k <= tol.max_doublings; ++k) {
        const double t0 = std::ldexp(start, k);
        bool all = true;
        for (std::size_t l = 0; l < lambdas.size() && all; ++l) {
            const MonotonicityCertificate c =
                verify_monotonicity(kind, lambdas[l], t0, beta0, tol.certificate_samples, tol);
            if (!c.pass) {
                all = false;
                last_reason = c.reason;
                last_failing = static_cast<int>(l);
            }
        }
        if (all) return t0;
    }
    std::ostringstream msg;
    msg << "no certified observation time up to " << std::ldexp(start, tol.max_doublings) << " for lambda = "
        << str(lambdas[last_failing]) << " (" << last_reason << ")";
    fail(ErrorKind::NoMonotoneTime, msg.str(), last_failing);
}

RecoveryResult recover_vector_order(const ObservationRecord& record, const MatrixSymbol& symbol,
                                    const BandLimitedData& data, double beta0, DerivativeKind kind,
                                    const InverseTolerances& tol) {
    tol.validate();
    validate_floor(beta0);
    if (record.kind != kind)
        fail(ErrorKind::InvalidArgument, "observation kind " + to_string(record.kind) +
                                             " does not match the requested kind " + to_string(kind));
    validate_time(record.t0);
    if (record.d.size() != symbol.size())
        fail(ErrorKind::InvalidArgument, "observation has " + std::to_string(record.d.size()) +
                                             " components, the symbol is " + std::to_string(symbol.size()) +
                                             "x" + std::to_string(symbol.size()));
    for (Eigen::Index j = 0; j < record.d.size(); ++j)
        if (!is_finite(record.d(j))) fail(ErrorKind::InvalidArgument, "observation value is not finite");

    const PointData p = point_data(symbol, data, record.xi0);
    RecoveryResult out;
    out.t0 = record.t0;
    out.xi0 = p.xi;
    out.kind = kind;
    out.xi0_on_node = p.on_node;
    out.tolerances = tol;
    out.lambdas = p.diag.eigenvalues;
    out.conditions = check_conditions(p.diag, kind);

    for (std::size_t l = 0; l < out.conditions.modes.size(); ++l) {
        const ModeCondition& c = out.conditions.modes[l];
        if (!c.spectral_ok) {
            std::ostringstream msg;
            msg << "eigenvalue lambda = " << str(c.lambda) << " at xi0 violates |arg lambda| > pi/2 (|arg| = "
                << std::abs(c.arg) << ")";
            fail(ErrorKind::SpectralConditionViolation, msg.str(), static_cast<int>(l));
        }
        if (c.sign_ok && !*c.sign_ok)
            fail(ErrorKind::DegenerateSignCondition,
                 "|Re lambda| = |Im lambda| for lambda = " + str(c.lambda) + " at xi0", static_cast<int>(l));
    }
    if (!out.conditions.degenerate.empty()) {
        const auto [a, b] = out.conditions.degenerate.front();
        fail(ErrorKind::DegenerateEigenvalues,
             "eigenvalues " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " coincide at xi0 (" +
                 str(out.lambdas(a)) + ")",
             a);
    }

    out.k = build_k_matrix(p.diag, p.phi, tol);
    out.targets = reduce_targets(out.k, record.d, p.diag, record.t0, kind, beta0, tol);

    out.order.floor = beta0;
    out.order.beta.resize(static_cast<Eigen::Index>(out.targets.size()));
    for (const ScalarTarget& s : out.targets) {
        MonotonicityCertificate c =
            verify_monotonicity(kind, s.lambda, record.t0, beta0, tol.certificate_samples, tol);
        if (!c.pass) {
            std::ostringstream msg;
            msg << "monotonicity is not certified at t0 = " << record.t0 << " for lambda = " << str(s.lambda)
                << " (" << c.reason << "); use a later observation time";
            fail(ErrorKind::NoMonotoneTime, msg.str(), s.index);
        }
        out.certificates.push_back(c);
        OrderRecovery r = recover_order(s, record.t0, beta0, tol);
        out.order.beta(s.index) = r.beta;
        out.modes.push_back(r);
    }
    return out;
}

}  // namespace fracorder
