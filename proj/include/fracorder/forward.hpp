#ifndef FRACORDER_FORWARD_HPP
#define FRACORDER_FORWARD_HPP

#include <string>
#include <vector>

#include "fracorder/mittag_leffler.hpp"
#include "fracorder/symbol.hpp"

namespace fracorder {

/// Orders beta_1..beta_m with the common floor beta0 <= beta_l <= 1.
struct VectorOrder {
    RVector beta;
    double floor = 0.1;

    int size() const { return static_cast<int>(beta.size()); }
    void validate() const;
};

/// Initial spectra phi_k tabulated on a frequency grid: values(node, k).
class BandLimitedData {
public:
    BandLimitedData(FrequencyBox box, CMatrix values, std::string preset = "table");

    /// phi_k = a_k exp(-|xi - c|^2 / (2 w^2)); mirror adds the conjugate bump at -c.
    static BandLimitedData gaussian(const FrequencyBox& box, const RVector& center, double width,
                                    const CVector& amplitudes, bool mirror = false);
    /// phi_k = a_k (1 + cos(pi |xi - c| / r)) / 2 inside the ball |xi - c| < r.
    static BandLimitedData raised_cosine(const FrequencyBox& box, const RVector& center, double radius,
                                         const CVector& amplitudes);
    /// phi_k = a_k p(|xi - c|^2) on the cube max_i |xi_i - c_i| <= r, zero outside;
    /// p(s) = sum_j coefficients[j] s^j.
    static BandLimitedData indicator_polynomial(const FrequencyBox& box, const RVector& center,
                                                double half_width, const RVector& coefficients,
                                                const CVector& amplitudes);

    const FrequencyBox& box() const { return box_; }
    const CMatrix& values() const { return values_; }
    const std::string& preset() const { return preset_; }
    int components() const { return static_cast<int>(values_.cols()); }

    CVector at_node(std::size_t node) const { return values_.row(node).transpose(); }
    /// Multilinear interpolation; exact node values on nodes. OutOfDomain outside the box.
    CVector at(const RVector& xi) const;

private:
    FrequencyBox box_;
    CMatrix values_;
    std::string preset_;
};

/// Spectrum files: binary grid of shape [N_1..N_n, m], or CSV with a header and one row per node
/// (xi_1..xi_n, re_phi_1, im_phi_1, ..., re_phi_m, im_phi_m).
BandLimitedData read_spectrum(const std::string& path, const FrequencyBox& box);
void write_spectrum_binary(const std::string& path, const BandLimitedData& data);
void write_spectrum_csv(const std::string& path, const BandLimitedData& data);

/// K = M^{-1} diag(M phi): column l carries mode l, and row sums reproduce phi.
CMatrix k_coeff(const Diagonalization& diag, const CVector& phi);

/// u_j = sum_l E_{beta_l}(lambda_l t^{beta_l}) K_{j,l}.
CVector fourier_solution_caputo(const Diagonalization& diag, const CVector& phi,
                                const VectorOrder& order, double t, const MLRegimePolicy& policy = {});

/// u_j = sum_l t^{beta_l - 1} E_{beta_l,beta_l}(lambda_l t^{beta_l}) K_{j,l}; requires t > 0.
CVector fourier_solution_rl(const Diagonalization& diag, const CVector& phi, const VectorOrder& order,
                            double t, const MLRegimePolicy& policy = {});

CVector fourier_solution(DerivativeKind kind, const Diagonalization& diag, const CVector& phi,
                         const VectorOrder& order, double t, const MLRegimePolicy& policy = {});

/// Fourier solution at every grid node: result(node, j).
CMatrix fourier_field(const MatrixSymbol& symbol, const BandLimitedData& data, const VectorOrder& order,
                      double t, DerivativeKind kind, int threads = 1,
                      const MLRegimePolicy& policy = {});

struct SpatialValue {
    CVector u;
    /// |trapezoid - trapezoid on every other node|, per component maximum.
    double error_estimate = 0.0;
};

/// (2 pi)^{-n} times the trapezoid sum of field(node, :) e^{i x xi} over the grid; n <= 3.
SpatialValue spatial_from_field(const FrequencyBox& box, const CMatrix& field, const RVector& x);

SpatialValue spatial_solution(const MatrixSymbol& symbol, const BandLimitedData& data,
                              const VectorOrder& order, double t, const RVector& x, DerivativeKind kind,
                              int threads = 1, const MLRegimePolicy& policy = {});

struct ObservationRecord {
    double t0 = 1.0;
    RVector xi0;
    CVector d;
    DerivativeKind kind = DerivativeKind::Caputo;
    std::string note;
};

/// Symbol and spectrum at xi0: the exact node when xi0 is one, otherwise the symbol at xi0 and the
/// interpolated spectrum (tabulated symbols must be sampled on a node).
struct PointData {
    RVector xi;
    Diagonalization diag;
    CVector phi;
    bool on_node = false;
};

PointData point_data(const MatrixSymbol& symbol, const BandLimitedData& data, const RVector& xi0);

ObservationRecord observe(const MatrixSymbol& symbol, const BandLimitedData& data, const VectorOrder& order,
                          double t0, const RVector& xi0, DerivativeKind kind,
                          const MLRegimePolicy& policy = {});

std::string observations_to_csv(const std::vector<ObservationRecord>& records);
std::vector<ObservationRecord> observations_from_csv(const std::string& text);
std::string observations_to_json(const std::vector<ObservationRecord>& records);
std::vector<ObservationRecord> observations_from_json(const std::string& text);

/// Reads CSV or JSON by content (JSON starts with '{' or '[').
std::vector<ObservationRecord> read_observations(const std::string& path);
/// Writes CSV when the path ends in .csv, JSON otherwise.
void write_observations(const std::string& path, const std::vector<ObservationRecord>& records);

}  // namespace fracorder

#endif  // FRACORDER_FORWARD_HPP
