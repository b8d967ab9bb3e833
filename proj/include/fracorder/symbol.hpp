#ifndef FRACORDER_SYMBOL_HPP
#define FRACORDER_SYMBOL_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracorder/core.hpp"

namespace fracorder {

/// Uniform tabulation grid on a box in R^n; endpoints are nodes, the last axis varies fastest.
struct FrequencyBox {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> points;

    int dim() const { return static_cast<int>(lower.size()); }
    std::size_t node_count() const;
    double spacing(int axis) const;
    double coordinate(int axis, int i) const;

    std::vector<int> multi_index(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& idx) const;
    RVector node(std::size_t flat) const;

    bool contains(const RVector& xi) const;
    /// The node xi sits on (within 1e-9 of a spacing per axis), if any.
    std::optional<std::size_t> node_of(const RVector& xi) const;

    void validate() const;
};

/// One term c * xi_1^{e_1} ... xi_n^{e_n}.
struct Monomial {
    std::vector<int> exponents;
    Complex coefficient;
};

using Polynomial = std::vector<Monomial>;

Complex evaluate_polynomial(const Polynomial& p, const RVector& xi);

/// Square matrix of polynomials, row-major.
struct PolynomialMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Polynomial> entries;

    CMatrix evaluate(const RVector& xi) const;
};

/// Closed-form factors A = M^{-1} diag(lambda) M, each entry a polynomial in xi.
struct SymbolFactorization {
    PolynomialMatrix m;
    PolynomialMatrix m_inv;
    std::vector<Polynomial> eigenvalues;
};

enum class SymbolKind { Polynomial, Builtin, Tabulated };

const char* to_string(SymbolKind kind);

class MatrixSymbol {
public:
    static MatrixSymbol polynomial(PolynomialMatrix entries,
                                   std::optional<SymbolFactorization> factors = std::nullopt);
    /// The 2x2 symbol [[-xi^2, -xi], [-xi, -xi^2]] on R^1 with its closed-form factors.
    static MatrixSymbol builtin_example();
    /// values[i] is the symbol at box.node(i).
    static MatrixSymbol tabulated(FrequencyBox box, std::vector<CMatrix> values);

    SymbolKind kind() const { return kind_; }
    int size() const { return m_; }
    /// Spatial dimension n, or nullopt for a polynomial that does not fix it.
    std::optional<int> dim() const { return dim_; }
    const std::string& name() const { return name_; }

    /// Restrict evaluation to a box (OutOfDomain outside it).
    void set_domain(FrequencyBox box);
    const std::optional<FrequencyBox>& domain() const { return domain_; }

    const std::optional<SymbolFactorization>& factorization() const { return factors_; }

    /// Entries at xi without the symmetry check.
    CMatrix raw(const RVector& xi) const;

private:
    SymbolKind kind_ = SymbolKind::Polynomial;
    int m_ = 0;
    std::optional<int> dim_;
    std::string name_;
    PolynomialMatrix poly_;
    std::optional<SymbolFactorization> factors_;
    std::optional<FrequencyBox> domain_;
    std::vector<CMatrix> table_;
};

CMatrix evaluate_symbol(const MatrixSymbol& symbol, const RVector& xi);

/// A = M^{-1} diag(eigenvalues) M. Eigenvalues sorted by descending real part, then imaginary part.
struct Diagonalization {
    CVector eigenvalues;
    CMatrix m;
    CMatrix m_inv;
    /// ||M||_1 ||M^{-1}||_1
    double condition = 1.0;
    bool closed_form = false;
};

Diagonalization diagonalize(const MatrixSymbol& symbol, const RVector& xi);

/// Descending real part, then descending imaginary part.
std::vector<int> eigenvalue_order(const CVector& lambda);

struct ModeCondition {
    Complex lambda;
    double arg = 0.0;
    /// |arg lambda| - pi/2
    double spectral_margin = 0.0;
    bool spectral_ok = false;
    /// Riemann-Liouville only: (|Re lambda| - |Im lambda|) / |lambda|.
    std::optional<double> sign_margin;
    std::optional<bool> sign_ok;
};

struct ConditionReport {
    DerivativeKind kind = DerivativeKind::Caputo;
    double margin_tol = 1e-12;
    std::vector<ModeCondition> modes;
    /// Zero-based index pairs of coinciding eigenvalues.
    std::vector<std::pair<int, int>> degenerate;

    bool all_ok() const;
};

ConditionReport check_conditions(const Diagonalization& diag, DerivativeKind kind,
                                 double margin_tol = 1e-12);

/// Grid nodes where the sorted eigenvalue labelling is not continuous along some axis
/// (a nearest-neighbour match to the next node disagrees with the index, or two eigenvalues meet).
std::vector<std::size_t> eigenvalue_crossings(const MatrixSymbol& symbol, const FrequencyBox& box,
                                              double rel_tol = 1e-8);

/// Node-major grid file: 16-byte magic, uint32 rank, uint32 shape[rank], then float64 (re, im)
/// pairs in row-major order.
struct GridArray {
    std::vector<std::size_t> shape;
    std::vector<Complex> values;
};

void write_grid_binary(const std::string& path, const GridArray& array);
GridArray read_grid_binary(const std::string& path);

/// Symbol table as CSV: one row per node in flat order, columns xi_1..xi_n then
/// re_A11, im_A11, re_A12, im_A12, ... (row-major). A header row is required.
MatrixSymbol read_symbol_csv(const std::string& path, const FrequencyBox& box, int m);
/// Binary symbol table of shape [N_1, ..., N_n, m, m].
MatrixSymbol read_symbol_binary(const std::string& path, const FrequencyBox& box);

}  // namespace fracorder

#endif  // FRACORDER_SYMBOL_HPP
