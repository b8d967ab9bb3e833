#include "fracorder/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "io_util.hpp"

namespace fracorder {

namespace {

constexpr char kGridMagic[17] = "FRACORDER_GRID01";
constexpr double kSymmetryTol = 1e-12;
constexpr double kInvariantTol = 1e-10;
constexpr double kMaxCondition = 1e12;

double norm_inf(const CMatrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }
double norm_one(const CMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

std::string describe(const RVector& xi) {
    std::ostringstream s;
    s << "(";
    for (Eigen::Index i = 0; i < xi.size(); ++i) s << (i ? ", " : "") << xi(i);
    s << ")";
    return s.str();
}

Polynomial mono(Complex c, int power) { return {Monomial{{power}, c}}; }

}  // namespace

// FrequencyBox

std::size_t FrequencyBox::node_count() const {
    std::size_t n = 1;
    for (int p : points) n *= static_cast<std::size_t>(p);
    return n;
}

double FrequencyBox::spacing(int axis) const {
    return (upper[axis] - lower[axis]) / (points[axis] - 1);
}

double FrequencyBox::coordinate(int axis, int i) const {
    if (i == points[axis] - 1) return upper[axis];
    return lower[axis] + (upper[axis] - lower[axis]) * i / (points[axis] - 1);
}

std::vector<int> FrequencyBox::multi_index(std::size_t flat) const {
    std::vector<int> idx(points.size());
    for (int a = dim() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % points[a]);
        flat /= points[a];
    }
    return idx;
}

std::size_t FrequencyBox::flat_index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * points[a] + idx[a];
    return flat;
}

RVector FrequencyBox::node(std::size_t flat) const {
    const std::vector<int> idx = multi_index(flat);
    RVector xi(dim());
    for (int a = 0; a < dim(); ++a) xi(a) = coordinate(a, idx[a]);
    return xi;
}

bool FrequencyBox::contains(const RVector& xi) const {
    if (xi.size() != dim()) return false;
    for (int a = 0; a < dim(); ++a) {
        const double slack = 1e-12 * (upper[a] - lower[a]);
        if (!(xi(a) >= lower[a] - slack && xi(a) <= upper[a] + slack)) return false;
    }
    return true;
}

std::optional<std::size_t> FrequencyBox::node_of(const RVector& xi) const {
    if (!contains(xi)) return std::nullopt;
    std::vector<int> idx(dim());
    for (int a = 0; a < dim(); ++a) {
        const double r = (xi(a) - lower[a]) / spacing(a);
        const double i = std::round(r);
        if (std::abs(r - i) > 1e-9 || i < 0 || i >= points[a]) return std::nullopt;
        idx[a] = static_cast<int>(i);
    }
    return flat_index(idx);
}

void FrequencyBox::validate() const {
    if (lower.empty()) fail(ErrorKind::InvalidArgument, "frequency box needs at least one axis");
    if (upper.size() != lower.size() || points.size() != lower.size())
        fail(ErrorKind::InvalidArgument, "frequency box bounds and point counts differ in length");
    for (int a = 0; a < dim(); ++a) {
        if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(lower[a] < upper[a]))
            fail(ErrorKind::InvalidArgument,
                 "frequency box axis " + std::to_string(a + 1) + " needs finite lower < upper");
        if (points[a] < 2)
            fail(ErrorKind::InvalidArgument,
                 "frequency box axis " + std::to_string(a + 1) + " needs at least 2 points");
    }
}

// Polynomials

Complex evaluate_polynomial(const Polynomial& p, const RVector& xi) {
    Complex sum = 0.0;
    for (const Monomial& t : p) {
        if (static_cast<Eigen::Index>(t.exponents.size()) > xi.size())
            fail(ErrorKind::InvalidArgument, "monomial has more exponents than xi has components");
        double v = 1.0;
        for (std::size_t a = 0; a < t.exponents.size(); ++a) {
            if (t.exponents[a] < 0) fail(ErrorKind::InvalidArgument, "negative monomial exponent");
            v *= std::pow(xi(static_cast<Eigen::Index>(a)), t.exponents[a]);
        }
        sum += t.coefficient * v;
    }
    return sum;
}

CMatrix PolynomialMatrix::evaluate(const RVector& xi) const {
    CMatrix out(rows, cols);
    for (int j = 0; j < rows; ++j)
        for (int k = 0; k < cols; ++k) out(j, k) = evaluate_polynomial(entries[j * cols + k], xi);
    return out;
}

// MatrixSymbol

const char* to_string(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::Polynomial: return "polynomial";
        case SymbolKind::Builtin: return "builtin";
        case SymbolKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

namespace {

std::optional<int> polynomial_dim(const PolynomialMatrix& p) {
    std::optional<int> n;
    for (const Polynomial& e : p.entries)
        for (const Monomial& t : e) n = std::max(n.value_or(0), static_cast<int>(t.exponents.size()));
    return n;
}

}  // namespace

MatrixSymbol MatrixSymbol::polynomial(PolynomialMatrix entries,
                                      std::optional<SymbolFactorization> factors) {
    if (entries.rows < 1 || entries.rows != entries.cols ||
        static_cast<int>(entries.entries.size()) != entries.rows * entries.cols)
        fail(ErrorKind::InvalidArgument, "polynomial symbol must be a square matrix of entries");
    const int m = entries.rows;
    if (factors) {
        auto square = [m](const PolynomialMatrix& p) {
            return p.rows == m && p.cols == m && static_cast<int>(p.entries.size()) == m * m;
        };
        if (!square(factors->m) || !square(factors->m_inv) ||
            static_cast<int>(factors->eigenvalues.size()) != m)
            fail(ErrorKind::InvalidArgument, "factorization shapes do not match the symbol size");
    }
    MatrixSymbol s;
    s.kind_ = SymbolKind::Polynomial;
    s.m_ = m;
    s.name_ = "polynomial";
    s.dim_ = polynomial_dim(entries);
    s.poly_ = std::move(entries);
    s.factors_ = std::move(factors);
    return s;
}

MatrixSymbol MatrixSymbol::builtin_example() {
    PolynomialMatrix a{2, 2, {mono(-1.0, 2), mono(-1.0, 1), mono(-1.0, 1), mono(-1.0, 2)}};
    SymbolFactorization f;
    f.m = {2, 2, {mono(1.0, 0), mono(-1.0, 0), mono(1.0, 0), mono(1.0, 0)}};
    f.m_inv = {2, 2, {mono(0.5, 0), mono(0.5, 0), mono(-0.5, 0), mono(0.5, 0)}};
    f.eigenvalues = {{Monomial{{2}, -1.0}, Monomial{{1}, 1.0}},
                     {Monomial{{2}, -1.0}, Monomial{{1}, -1.0}}};
    MatrixSymbol s = polynomial(std::move(a), std::move(f));
    s.kind_ = SymbolKind::Builtin;
    s.name_ = "example-sec4";
    s.dim_ = 1;
    return s;
}

MatrixSymbol MatrixSymbol::tabulated(FrequencyBox box, std::vector<CMatrix> values) {
    box.validate();
    if (values.size() != box.node_count())
        fail(ErrorKind::InvalidArgument, "tabulated symbol needs one matrix per grid node");
    if (values.empty() || values.front().rows() < 1 || values.front().rows() != values.front().cols())
        fail(ErrorKind::InvalidArgument, "tabulated symbol values must be square matrices");
    const Eigen::Index m = values.front().rows();
    for (const CMatrix& v : values) {
        if (v.rows() != m || v.cols() != m)
            fail(ErrorKind::InvalidArgument, "tabulated symbol matrices differ in size");
    }
    MatrixSymbol s;
    s.kind_ = SymbolKind::Tabulated;
    s.m_ = static_cast<int>(m);
    s.dim_ = box.dim();
    s.name_ = "tabulated";
    s.domain_ = std::move(box);
    s.table_ = std::move(values);
    return s;
}

void MatrixSymbol::set_domain(FrequencyBox box) {
    box.validate();
    if (dim_ && *dim_ > box.dim())
        fail(ErrorKind::InvalidArgument, "symbol depends on more frequency components than the box has");
    if (kind_ == SymbolKind::Tabulated) {
        const FrequencyBox& own = *domain_;
        if (own.lower != box.lower || own.upper != box.upper || own.points != box.points)
            fail(ErrorKind::InvalidArgument, "tabulated symbol grid differs from the frequency box");
    }
    domain_ = std::move(box);
}

CMatrix MatrixSymbol::raw(const RVector& xi) const {
    if (domain_) {
        if (xi.size() != domain_->dim())
            fail(ErrorKind::OutOfDomain, "xi has " + std::to_string(xi.size()) +
                                             " components, the frequency box has " +
                                             std::to_string(domain_->dim()));
        if (!domain_->contains(xi))
            fail(ErrorKind::OutOfDomain, "xi = " + describe(xi) + " lies outside the frequency box");
    }
    if (kind_ == SymbolKind::Tabulated) {
        const auto node = domain_->node_of(xi);
        if (!node)
            fail(ErrorKind::OutOfDomain,
                 "tabulated symbol is only defined at grid nodes; xi = " + describe(xi) + " is not one");
        return table_[*node];
    }
    if (dim_ && xi.size() < *dim_)
        fail(ErrorKind::OutOfDomain, "xi has fewer components than the symbol uses");
    return poly_.evaluate(xi);
}

CMatrix evaluate_symbol(const MatrixSymbol& symbol, const RVector& xi) {
    CMatrix a = symbol.raw(xi);
    for (Eigen::Index j = 0; j < a.rows(); ++j)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            if (!is_finite(a(j, k)))
                fail(ErrorKind::NonFinite, "symbol entry is not finite at xi = " + describe(xi));
    const double scale = a.cwiseAbs().maxCoeff();
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * (1.0 + scale)) {
        std::ostringstream msg;
        msg << "symbol is not symmetric at xi = " << describe(xi) << " (max |A_jk - A_kj| = " << asym
            << ")";
        fail(ErrorKind::NonSymmetric, msg.str());
    }
    return a;
}

// Diagonalization

std::vector<int> eigenvalue_order(const CVector& lambda) {
    std::vector<int> order(lambda.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (lambda(a).real() != lambda(b).real()) return lambda(a).real() > lambda(b).real();
        return lambda(a).imag() > lambda(b).imag();
    });
    return order;
}

Diagonalization diagonalize(const MatrixSymbol& symbol, const RVector& xi) {
    const CMatrix a = evaluate_symbol(symbol, xi);
    const Eigen::Index m = a.rows();
    Diagonalization d;

    if (const auto& f = symbol.factorization()) {
        d.eigenvalues.resize(m);
        for (Eigen::Index l = 0; l < m; ++l) d.eigenvalues(l) = evaluate_polynomial(f->eigenvalues[l], xi);
        d.m = f->m.evaluate(xi);
        d.m_inv = f->m_inv.evaluate(xi);
        d.closed_form = true;
    } else if (a.imag().cwiseAbs().maxCoeff() <= kSymmetryTol * (1.0 + a.cwiseAbs().maxCoeff())) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(a.real());
        if (es.info() != Eigen::Success)
            fail(ErrorKind::NotDiagonalizable, "symmetric eigensolver failed at xi = " + describe(xi));
        RMatrix v = es.eigenvectors();
        for (Eigen::Index c = 0; c < m; ++c) {
            Eigen::Index big = 0;
            v.col(c).cwiseAbs().maxCoeff(&big);
            if (v(big, c) < 0.0) v.col(c) = -v.col(c);
        }
        d.eigenvalues = es.eigenvalues().cast<Complex>();
        d.m_inv = v.cast<Complex>();
        d.m = v.transpose().cast<Complex>();
    } else {
        Eigen::ComplexEigenSolver<CMatrix> es(a);
        if (es.info() != Eigen::Success)
            fail(ErrorKind::NotDiagonalizable, "eigensolver failed at xi = " + describe(xi));
        const CMatrix v = es.eigenvectors();
        Eigen::FullPivLU<CMatrix> lu(v);
        if (!lu.isInvertible())
            fail(ErrorKind::NotDiagonalizable, "eigenvector matrix is singular at xi = " + describe(xi));
        d.eigenvalues = es.eigenvalues();
        d.m_inv = v;
        d.m = lu.inverse();
    }

    d.condition = norm_one(d.m) * norm_one(d.m_inv);
    if (!(d.condition <= kMaxCondition)) {
        std::ostringstream msg;
        msg << "eigenvector matrix condition number " << d.condition << " exceeds 1e12 at xi = "
            << describe(xi);
        fail(ErrorKind::NotDiagonalizable, msg.str());
    }

    const std::vector<int> order = eigenvalue_order(d.eigenvalues);
    Diagonalization sorted = d;
    for (Eigen::Index l = 0; l < m; ++l) {
        sorted.eigenvalues(l) = d.eigenvalues(order[l]);
        sorted.m.row(l) = d.m.row(order[l]);
        sorted.m_inv.col(l) = d.m_inv.col(order[l]);
    }

    const CMatrix recon = sorted.m_inv * sorted.eigenvalues.asDiagonal() * sorted.m;
    const double recon_err = norm_inf(recon - a);
    const double inv_err = norm_inf(sorted.m * sorted.m_inv - CMatrix::Identity(m, m));
    if (!(recon_err <= kInvariantTol * (1.0 + norm_inf(a))) || !(inv_err <= kInvariantTol)) {
        std::ostringstream msg;
        msg << "factorization check failed at xi = " << describe(xi) << " (reconstruction "
            << recon_err << ", M M^-1 - I " << inv_err << ")";
        fail(ErrorKind::NotDiagonalizable, msg.str());
    }
    return sorted;
}

// Conditions

bool ConditionReport::all_ok() const {
    if (!degenerate.empty()) return false;
    for (const ModeCondition& c : modes) {
        if (!c.spectral_ok) return false;
        if (c.sign_ok && !*c.sign_ok) return false;
    }
    return true;
}

ConditionReport check_conditions(const Diagonalization& diag, DerivativeKind kind, double margin_tol) {
    ConditionReport r;
    r.kind = kind;
    r.margin_tol = margin_tol;
    const Eigen::Index m = diag.eigenvalues.size();
    double scale = 0.0;
    for (Eigen::Index l = 0; l < m; ++l) {
        const Complex lambda = diag.eigenvalues(l);
        scale = std::max(scale, std::abs(lambda));
        ModeCondition c;
        c.lambda = lambda;
        c.arg = std::arg(lambda);
        c.spectral_margin = std::abs(c.arg) - kPi / 2.0;
        c.spectral_ok = is_finite(lambda) && c.spectral_margin > margin_tol;
        if (kind == DerivativeKind::RiemannLiouville) {
            const double diff = std::abs(lambda.real()) - std::abs(lambda.imag());
            const double mod = std::abs(lambda);
            c.sign_margin = mod > 0.0 ? diff / mod : 0.0;
            c.sign_ok = std::abs(diff) > 1e-12 * mod;
        }
        r.modes.push_back(c);
    }
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a + 1; b < m; ++b)
            if (std::abs(diag.eigenvalues(a) - diag.eigenvalues(b)) <= 1e-10 * (1.0 + scale))
                r.degenerate.emplace_back(static_cast<int>(a), static_cast<int>(b));
    return r;
}

std::vector<std::size_t> eigenvalue_crossings(const MatrixSymbol& symbol, const FrequencyBox& box,
                                              double rel_tol) {
    box.validate();
    const std::size_t count = box.node_count();
    std::vector<CVector> lambda(count);
    for (std::size_t i = 0; i < count; ++i) lambda[i] = diagonalize(symbol, box.node(i)).eigenvalues;

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < count; ++i) {
        const CVector& la = lambda[i];
        const double scale = 1.0 + la.cwiseAbs().maxCoeff();
        bool flag = false;
        for (Eigen::Index a = 0; a < la.size() && !flag; ++a)
            for (Eigen::Index b = a + 1; b < la.size() && !flag; ++b)
                flag = std::abs(la(a) - la(b)) <= rel_tol * scale;
        const std::vector<int> idx = box.multi_index(i);
        for (int axis = 0; axis < box.dim() && !flag; ++axis) {
            if (idx[axis] + 1 >= box.points[axis]) continue;
            std::vector<int> next = idx;
            ++next[axis];
            const CVector& lb = lambda[box.flat_index(next)];
            for (Eigen::Index l = 0; l < la.size() && !flag; ++l) {
                Eigen::Index nearest = 0;
                (lb.array() - la(l)).abs().minCoeff(&nearest);
                flag = nearest != l;
            }
        }
        if (flag) flagged.push_back(i);
    }
    return flagged;
}

// Grid files

void write_grid_binary(const std::string& path, const GridArray& array) {
    std::size_t expected = 1;
    for (std::size_t s : array.shape) expected *= s;
    if (expected != array.values.size())
        fail(ErrorKind::InvalidArgument, "grid array shape does not match its value count");
    std::string buf(kGridMagic, 16);
    auto put = [&buf](const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); };
    const auto rank = static_cast<std::uint32_t>(array.shape.size());
    put(&rank, sizeof rank);
    for (std::size_t s : array.shape) {
        const auto d = static_cast<std::uint32_t>(s);
        put(&d, sizeof d);
    }
    for (const Complex& v : array.values) {
        const double re = v.real(), im = v.imag();
        put(&re, sizeof re);
        put(&im, sizeof im);
    }
    detail::write_file_atomic(path, buf);
}

GridArray read_grid_binary(const std::string& path) {
    const std::string buf = detail::read_text_file(path);
    std::size_t pos = 0;
    auto take = [&](void* dst, std::size_t n) {
        if (pos + n > buf.size()) fail(ErrorKind::IoError, "'" + path + "' is truncated");
        std::memcpy(dst, buf.data() + pos, n);
        pos += n;
    };
    char magic[16];
    take(magic, 16);
    if (std::memcmp(magic, kGridMagic, 16) != 0)
        fail(ErrorKind::IoError, "'" + path + "' does not start with the FRACORDER_GRID01 magic");
    std::uint32_t rank = 0;
    take(&rank, sizeof rank);
    if (rank == 0 || rank > 8) fail(ErrorKind::IoError, "'" + path + "' has an unsupported rank");
    GridArray out;
    std::size_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
        std::uint32_t d = 0;
        take(&d, sizeof d);
        out.shape.push_back(d);
        count *= d;
    }
    if (buf.size() - pos != count * 16)
        fail(ErrorKind::IoError, "'" + path + "' payload size does not match its shape");
    out.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        double re = 0.0, im = 0.0;
        take(&re, sizeof re);
        take(&im, sizeof im);
        out.values[i] = Complex(re, im);
    }
    return out;
}

MatrixSymbol read_symbol_csv(const std::string& path, const FrequencyBox& box, int m) {
    box.validate();
    if (m < 1) fail(ErrorKind::InvalidArgument, "symbol size m must be positive");
    const std::vector<std::string> lines = detail::csv_lines(detail::read_text_file(path));
    const std::size_t n = static_cast<std::size_t>(box.dim());
    const std::size_t cols = n + 2 * static_cast<std::size_t>(m * m);
    if (lines.size() != box.node_count() + 1)
        fail(ErrorKind::IoError, "'" + path + "' needs a header and " +
                                     std::to_string(box.node_count()) + " rows");
    std::vector<CMatrix> values;
    values.reserve(box.node_count());
    for (std::size_t i = 0; i < box.node_count(); ++i) {
        const std::vector<std::string> f = detail::split_csv_line(lines[i + 1]);
        const std::string where = path + " row " + std::to_string(i + 2);
        if (f.size() != cols) fail(ErrorKind::IoError, where + " needs " + std::to_string(cols) + " columns");
        const RVector node = box.node(i);
        for (std::size_t a = 0; a < n; ++a) {
            const double x = detail::parse_double(f[a], where);
            if (std::abs(x - node(static_cast<Eigen::Index>(a))) > 1e-9 * box.spacing(static_cast<int>(a)))
                fail(ErrorKind::IoError, where + " is not at the expected grid node");
        }
        CMatrix v(m, m);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const std::size_t c = n + 2 * static_cast<std::size_t>(j * m + k);
                v(j, k) = Complex(detail::parse_double(f[c], where), detail::parse_double(f[c + 1], where));
            }
        values.push_back(std::move(v));
    }
    return MatrixSymbol::tabulated(box, std::move(values));
}

MatrixSymbol read_symbol_binary(const std::string& path, const FrequencyBox& box) {
    box.validate();
    const GridArray g = read_grid_binary(path);
    const std::size_t n = static_cast<std::size_t>(box.dim());
    if (g.shape.size() != n + 2 || g.shape[n] != g.shape[n + 1])
        fail(ErrorKind::IoError, "'" + path + "' must have shape [N_1..N_n, m, m]");
    for (std::size_t a = 0; a < n; ++a)
        if (g.shape[a] != static_cast<std::size_t>(box.points[a]))
            fail(ErrorKind::IoError, "'" + path + "' grid shape differs from the frequency box");
    const auto m = static_cast<Eigen::Index>(g.shape[n]);
    std::vector<CMatrix> values(box.node_count(), CMatrix(m, m));
    std::size_t pos = 0;
    for (CMatrix& v : values)
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index k = 0; k < m; ++k) v(j, k) = g.values[pos++];
    return MatrixSymbol::tabulated(box, std::move(values));
}

}  // namespace fracorder
