#ifndef FRACORDER_INVERSE_HPP
#define FRACORDER_INVERSE_HPP

#include <optional>
#include <string>
#include <vector>

#include "fracorder/forward.hpp"
#include "fracorder/mittag_leffler.hpp"
#include "fracorder/symbol.hpp"

namespace fracorder {

struct InverseTolerances {
    /// Final bisection bracket width.
    double beta_tol = 1e-9;
    /// residual_tol = residual_rel * (min(1, |R(beta0)|) + |b_l|).
    double residual_rel = 1e-7;
    /// det_tol = det_rel * ||K||_inf^m.
    double det_rel = 1e-12;
    double max_k_condition = 1e10;
    /// Range slack relative to max(|R(1)|, |R(beta0)|).
    double range_slack = 1e-9;
    int certificate_samples = 1000;
    /// Each certificate step must drop by at least strict_margin * |R(beta0)|.
    double strict_margin = 1e-14;
    /// suggest_observation_time gives up beyond start * 2^max_doublings.
    int max_doublings = 40;
    MLRegimePolicy ml;

    void validate() const;
};

struct KMatrix {
    CMatrix k;
    Complex det;
    double det_tol = 0.0;
    /// ||K||_1 ||K^{-1}||_1 (infinite when singular).
    double condition = 0.0;
    bool well_posed = false;
};

KMatrix build_k_matrix(const Diagonalization& diag, const CVector& phi, const InverseTolerances& tol = {});

/// One scalar equation e_l(beta) = b_l; the monotone quantity is sign_factor * Re e_l.
struct ScalarTarget {
    int index = 0;
    Complex lambda;
    Complex b;
    DerivativeKind kind = DerivativeKind::Caputo;
    int sign_factor = 1;
    /// R(1) and R(beta0): the admissible range of sign_factor * Re b.
    double r_one = 0.0;
    double r_floor = 0.0;
    double slack = 0.0;

    double target() const { return sign_factor * b.real(); }
};

std::vector<ScalarTarget> reduce_targets(const KMatrix& k, const CVector& d, const Diagonalization& diag,
                                         double t0, DerivativeKind kind, double beta0,
                                         const InverseTolerances& tol = {});

struct MonotonicityCertificate {
    bool pass = false;
    int samples = 0;
    std::optional<int> first_violation;
    std::string reason;
    Complex lambda;
    double t0 = 0.0;
    double beta0 = 0.0;
    DerivativeKind kind = DerivativeKind::Caputo;
    SignedLog r_one;
    SignedLog r_floor;
};

MonotonicityCertificate verify_monotonicity(DerivativeKind kind, Complex lambda, double t0, double beta0,
                                            int n_samples = 1000, const InverseTolerances& tol = {});

struct OrderRecovery {
    int index = 0;
    double beta = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    /// |R(beta*) - sign_factor Re b|
    double real_residual = 0.0;
    /// |e(beta*) - b|
    double complex_residual = 0.0;
    double residual_tol = 0.0;
    /// Target fell within the slack past an endpoint and beta* was set to that endpoint.
    bool clamped = false;
    bool at_right_endpoint = false;
};

/// Bisection on the monotone map over [beta0, 1]. Does not certify monotonicity itself.
OrderRecovery recover_order(const ScalarTarget& target, double t0, double beta0,
                            const InverseTolerances& tol = {});

/// T0 = e^{1-gamma} (Caputo) or T1 = T0 e^{2/beta0} (RL), doubled until every certificate passes.
double suggest_observation_time(DerivativeKind kind, double beta0, const std::vector<Complex>& lambdas,
                                const InverseTolerances& tol = {});

double observation_time_start(DerivativeKind kind, double beta0);

struct RecoveryResult {
    VectorOrder order;
    double t0 = 0.0;
    RVector xi0;
    DerivativeKind kind = DerivativeKind::Caputo;
    bool xi0_on_node = false;
    ConditionReport conditions;
    KMatrix k;
    CVector lambdas;
    std::vector<ScalarTarget> targets;
    std::vector<OrderRecovery> modes;
    std::vector<MonotonicityCertificate> certificates;
    InverseTolerances tolerances;
};

RecoveryResult recover_vector_order(const ObservationRecord& record, const MatrixSymbol& symbol,
                                    const BandLimitedData& data, double beta0, DerivativeKind kind,
                                    const InverseTolerances& tol = {});

}  // namespace fracorder

#endif  // FRACORDER_INVERSE_HPP
