#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fracorder/symbol.hpp"

using namespace fracorder;

namespace {

RVector vec(std::initializer_list<double> v) {
    RVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

FrequencyBox line(double lo, double hi, int n) { return FrequencyBox{{lo}, {hi}, {n}}; }

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::IoError;
}

// [[-xi^2, -xi], [-xi, -xi^2]] with no factorization attached.
MatrixSymbol example_polynomial() {
    const Polynomial diag{Monomial{{2}, -1.0}};
    const Polynomial off{Monomial{{1}, -1.0}};
    return MatrixSymbol::polynomial(PolynomialMatrix{2, 2, {diag, off, off, diag}});
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("fracorder_symbol_" + name)).string();
}

double inf_norm(const CMatrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

TEST_CASE("frequency box grid") {
    const FrequencyBox box{{-1.0, 0.0}, {1.0, 2.0}, {5, 3}};
    CHECK(box.node_count() == 15);
    CHECK(box.spacing(0) == doctest::Approx(0.5));
    CHECK(box.coordinate(0, 4) == 1.0);
    CHECK(box.multi_index(4) == std::vector<int>{1, 1});
    CHECK(box.flat_index({4, 2}) == 14);
    CHECK(box.node(14)(1) == 2.0);
    CHECK(box.contains(vec({1.0, 2.0})));
    CHECK_FALSE(box.contains(vec({1.1, 0.0})));
    CHECK(box.node_of(vec({0.5, 1.0})) == std::optional<std::size_t>(box.flat_index({3, 1})));
    CHECK_FALSE(box.node_of(vec({0.3, 1.0})).has_value());
    CHECK(kind_of([] { FrequencyBox{{1.0}, {0.0}, {3}}.validate(); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { FrequencyBox{{0.0}, {1.0}, {1}}.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("builtin example entries") {
    const MatrixSymbol s = MatrixSymbol::builtin_example();
    CHECK(s.kind() == SymbolKind::Builtin);
    CHECK(s.size() == 2);
    const CMatrix a = evaluate_symbol(s, vec({2.0}));
    CHECK(a(0, 0) == Complex(-4.0));
    CHECK(a(0, 1) == Complex(-2.0));
    CHECK(a(1, 0) == Complex(-2.0));
    CHECK(a(1, 1) == Complex(-4.0));
}

TEST_CASE("polynomial kind is zero at the origin") {
    const CMatrix a = evaluate_symbol(example_polynomial(), vec({0.0}));
    CHECK(a.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("builtin eigenvalues at xi = 2") {
    const Diagonalization d = diagonalize(MatrixSymbol::builtin_example(), vec({2.0}));
    CHECK(d.closed_form);
    CHECK(d.eigenvalues(0) == Complex(-2.0));
    CHECK(d.eigenvalues(1) == Complex(-6.0));
    CHECK(std::abs(d.m(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(d.m(0, 1) + 1.0) < 1e-15);
}

TEST_CASE("numeric and closed-form factorizations agree on the eigenvalues") {
    const Diagonalization a = diagonalize(example_polynomial(), vec({2.0}));
    CHECK_FALSE(a.closed_form);
    CHECK(std::abs(a.eigenvalues(0) + 2.0) < 1e-13);
    CHECK(std::abs(a.eigenvalues(1) + 6.0) < 1e-13);
    const CMatrix mt = a.m * a.m.adjoint();
    CHECK((mt - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("property: reconstruction at 100 random frequencies") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    const MatrixSymbol symbols[] = {MatrixSymbol::builtin_example(), example_polynomial()};
    for (const MatrixSymbol& s : symbols) {
        for (int i = 0; i < 100; ++i) {
            const RVector xi = vec({u(rng)});
            const CMatrix a = evaluate_symbol(s, xi);
            const Diagonalization d = diagonalize(s, xi);
            const CMatrix recon = d.m_inv * d.eigenvalues.asDiagonal() * d.m;
            CHECK(inf_norm(recon - a) <= 1e-10 * (1.0 + inf_norm(a)));
            CHECK(inf_norm(d.m * d.m_inv - CMatrix::Identity(2, 2)) <= 1e-10);
        }
    }
}

TEST_CASE("property: builtin eigenvalues as a set on |xi| <= 10") {
    for (int i = 0; i <= 400; ++i) {
        const double x = -10.0 + 0.05 * i;
        for (const MatrixSymbol& s : {MatrixSymbol::builtin_example(), example_polynomial()}) {
            const Diagonalization d = diagonalize(s, vec({x}));
            const double hi = std::max(-x * x + x, -x * x - x);
            const double lo = std::min(-x * x + x, -x * x - x);
            CHECK(std::abs(d.eigenvalues(0) - hi) <= 1e-12 * (1.0 + std::abs(hi)));
            CHECK(std::abs(d.eigenvalues(1) - lo) <= 1e-12 * (1.0 + std::abs(lo)));
        }
    }
}

TEST_CASE("eigenvalue ordering: descending real part, then imaginary part") {
    CVector l(4);
    l << Complex(-2.0, 1.0), Complex(-1.0, -3.0), Complex(-2.0, 2.0), Complex(-5.0, 0.0);
    CHECK(eigenvalue_order(l) == std::vector<int>{1, 2, 0, 3});
}

TEST_CASE("condition report examples") {
    const MatrixSymbol s = MatrixSymbol::builtin_example();
    const ConditionReport r = check_conditions(diagonalize(s, vec({2.0})), DerivativeKind::RiemannLiouville);
    REQUIRE(r.modes.size() == 2);
    for (const ModeCondition& c : r.modes) {
        CHECK(c.spectral_ok);
        CHECK(std::abs(c.arg) == doctest::Approx(kPi));
        CHECK(c.sign_ok == std::optional<bool>(true));
    }
    CHECK(r.all_ok());

    const ConditionReport bad = check_conditions(diagonalize(s, vec({0.5})), DerivativeKind::Caputo);
    CHECK(bad.modes[0].lambda == Complex(0.25));
    CHECK_FALSE(bad.modes[0].spectral_ok);
    CHECK_FALSE(bad.modes[0].sign_ok.has_value());
    CHECK_FALSE(bad.all_ok());

    Diagonalization d;
    d.eigenvalues = CVector::Constant(1, Complex(-1.0, 1.0));
    const ConditionReport rl = check_conditions(d, DerivativeKind::RiemannLiouville);
    CHECK(rl.modes[0].spectral_ok);
    CHECK(rl.modes[0].sign_ok == std::optional<bool>(false));
    CHECK(check_conditions(d, DerivativeKind::Caputo).all_ok());
}

TEST_CASE("property: spectral_ok iff |arg| > pi/2 + margin") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 500; ++i) {
        Diagonalization d;
        d.eigenvalues = CVector::Constant(1, std::polar(1.0 + i % 7, u(rng)));
        const ConditionReport r = check_conditions(d, DerivativeKind::Caputo, 1e-12);
        CHECK(r.modes[0].spectral_ok == (std::abs(std::arg(d.eigenvalues(0))) > kPi / 2.0 + 1e-12));
    }
}

TEST_CASE("degenerate eigenvalues are reported") {
    const ConditionReport r = check_conditions(diagonalize(MatrixSymbol::builtin_example(), vec({0.0})),
                                               DerivativeKind::Caputo);
    REQUIRE(r.degenerate.size() == 1);
    CHECK(r.degenerate[0] == std::pair<int, int>(0, 1));
}

TEST_CASE("property: ordering is continuous except at flagged crossings") {
    const FrequencyBox box = line(-4.0, 4.0, 81);
    const std::vector<std::size_t> flagged = eigenvalue_crossings(MatrixSymbol::builtin_example(), box);
    REQUIRE_FALSE(flagged.empty());
    for (std::size_t i : flagged) CHECK(std::abs(box.node(i)(0)) <= box.spacing(0) + 1e-12);
    CHECK(std::find(flagged.begin(), flagged.end(), std::size_t{40}) != flagged.end());
    const FrequencyBox right = line(0.5, 4.0, 36);
    CHECK(eigenvalue_crossings(MatrixSymbol::builtin_example(), right).empty());
}

TEST_CASE("symmetry and domain errors") {
    const Polynomial one{Monomial{{0}, 1.0}};
    const Polynomial x{Monomial{{1}, 1.0}};
    const MatrixSymbol skew = MatrixSymbol::polynomial(PolynomialMatrix{2, 2, {one, x, Polynomial{}, one}});
    CHECK(kind_of([&] { evaluate_symbol(skew, vec({1.0})); }) == ErrorKind::NonSymmetric);
    CHECK_NOTHROW(evaluate_symbol(skew, vec({0.0})));

    MatrixSymbol s = MatrixSymbol::builtin_example();
    s.set_domain(line(-4.0, 4.0, 9));
    CHECK(kind_of([&] { evaluate_symbol(s, vec({4.5})); }) == ErrorKind::OutOfDomain);
    CHECK_NOTHROW(evaluate_symbol(s, vec({4.0})));
}

TEST_CASE("complex symmetric symbol that is not diagonalizable") {
    const Polynomial one{Monomial{{0}, 1.0}};
    const Polynomial minus_one{Monomial{{0}, -1.0}};
    const Polynomial i{Monomial{{0}, Complex(0.0, 1.0)}};
    const MatrixSymbol s = MatrixSymbol::polynomial(PolynomialMatrix{2, 2, {one, i, i, minus_one}});
    CHECK(kind_of([&] { diagonalize(s, vec({0.0})); }) == ErrorKind::NotDiagonalizable);
}

TEST_CASE("complex symmetric diagonalizable symbol") {
    const Polynomial d1{Monomial{{0}, Complex(-2.0, 0.5)}};
    const Polynomial d2{Monomial{{0}, Complex(-1.0, -0.25)}};
    const Polynomial off{Monomial{{0}, Complex(0.3, 0.1)}};
    const MatrixSymbol s = MatrixSymbol::polynomial(PolynomialMatrix{2, 2, {d1, off, off, d2}});
    const Diagonalization d = diagonalize(s, vec({0.0}));
    CHECK(d.eigenvalues(0).real() >= d.eigenvalues(1).real());
    const CMatrix a = evaluate_symbol(s, vec({0.0}));
    CHECK(inf_norm(d.m_inv * d.eigenvalues.asDiagonal() * d.m - a) <= 1e-10 * (1.0 + inf_norm(a)));
}

TEST_CASE("tabulated symbol round-trips through CSV and binary files") {
    const FrequencyBox box = line(-1.0, 1.0, 5);
    std::vector<CMatrix> values;
    for (std::size_t i = 0; i < box.node_count(); ++i) {
        const double x = box.node(i)(0);
        CMatrix a(2, 2);
        a << Complex(-1.0 - x * x, 0.1 * x), Complex(0.25 * x, 0.0), Complex(0.25 * x, 0.0), Complex(-3.0, -0.2);
        values.push_back(a);
    }
    const MatrixSymbol direct = MatrixSymbol::tabulated(box, values);
    for (std::size_t i = 0; i < box.node_count(); ++i) CHECK(evaluate_symbol(direct, box.node(i)) == values[i]);
    CHECK(kind_of([&] { evaluate_symbol(direct, vec({0.1})); }) == ErrorKind::OutOfDomain);

    const std::string csv = temp_path("table.csv");
    {
        std::ofstream out(csv);
        out << "xi_1,re_a11,im_a11,re_a12,im_a12,re_a21,im_a21,re_a22,im_a22\n";
        char buf[64];
        for (std::size_t i = 0; i < box.node_count(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", box.node(i)(0));
            out << buf;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", values[i](r, c).real(), values[i](r, c).imag());
                    out << buf;
                }
            out << "\n";
        }
    }
    const MatrixSymbol from_csv = read_symbol_csv(csv, box, 2);
    CHECK(from_csv.kind() == SymbolKind::Tabulated);
    for (std::size_t i = 0; i < box.node_count(); ++i) CHECK(evaluate_symbol(from_csv, box.node(i)) == values[i]);

    GridArray grid;
    grid.shape = {5, 2, 2};
    for (const CMatrix& a : values)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) grid.values.push_back(a(r, c));
    const std::string bin = temp_path("table.bin");
    write_grid_binary(bin, grid);
    const GridArray back = read_grid_binary(bin);
    CHECK(back.shape == grid.shape);
    CHECK(back.values == grid.values);
    const MatrixSymbol from_bin = read_symbol_binary(bin, box);
    for (std::size_t i = 0; i < box.node_count(); ++i) CHECK(evaluate_symbol(from_bin, box.node(i)) == values[i]);

    CHECK(kind_of([&] { read_symbol_binary(bin, line(-1.0, 1.0, 6)); }) == ErrorKind::IoError);
    CHECK(kind_of([&] { read_grid_binary(csv); }) == ErrorKind::IoError);
    std::filesystem::remove(csv);
    std::filesystem::remove(bin);
}

TEST_CASE("tabulated symbol with non-finite entries") {
    const FrequencyBox box = line(0.0, 1.0, 2);
    CMatrix bad = CMatrix::Identity(1, 1) * std::numeric_limits<double>::quiet_NaN();
    const MatrixSymbol s = MatrixSymbol::tabulated(box, {CMatrix::Identity(1, 1), bad});
    CHECK(kind_of([&] { evaluate_symbol(s, vec({1.0})); }) == ErrorKind::NonFinite);
}
