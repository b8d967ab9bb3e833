#include "fracorder/forward.hpp"

#include <cmath>
#include <sstream>

#include "fracorder/parallel.hpp"
#include "io_util.hpp"
#include "json_out.hpp"

namespace fracorder {

namespace {

void require_components(const CVector& phi, const Diagonalization& diag) {
    if (phi.size() != diag.eigenvalues.size())
        fail(ErrorKind::InvalidArgument, "spectrum has " + std::to_string(phi.size()) +
                                             " components, the symbol is " +
                                             std::to_string(diag.eigenvalues.size()) + "x" +
                                             std::to_string(diag.eigenvalues.size()));
}

void require_order(const VectorOrder& order, const Diagonalization& diag) {
    order.validate();
    if (order.size() != diag.eigenvalues.size())
        fail(ErrorKind::InvalidArgument, "vector order has " + std::to_string(order.size()) +
                                             " components, the symbol has " +
                                             std::to_string(diag.eigenvalues.size()) + " modes");
}

double distance(const RVector& xi, const RVector& c) {
    if (c.size() != xi.size())
        fail(ErrorKind::InvalidArgument, "preset center dimension differs from the frequency box");
    return (xi - c).norm();
}

template <class Profile>
BandLimitedData tabulate(const FrequencyBox& box, const CVector& amplitudes, std::string preset,
                         Profile&& profile) {
    box.validate();
    if (amplitudes.size() < 1) fail(ErrorKind::InvalidArgument, "preset needs at least one amplitude");
    CMatrix values(static_cast<Eigen::Index>(box.node_count()), amplitudes.size());
    for (std::size_t i = 0; i < box.node_count(); ++i)
        values.row(static_cast<Eigen::Index>(i)) = profile(box.node(i)).transpose();
    return BandLimitedData(box, std::move(values), std::move(preset));
}

}  // namespace

void VectorOrder::validate() const {
    if (!(floor > 0.0 && floor < 1.0))
        fail(ErrorKind::InvalidArgument, "order floor beta0 must lie in (0, 1)");
    if (beta.size() < 1) fail(ErrorKind::InvalidArgument, "vector order is empty");
    for (Eigen::Index l = 0; l < beta.size(); ++l) {
        if (!(beta(l) >= floor && beta(l) <= 1.0)) {
            std::ostringstream msg;
            msg << "order beta_" << l + 1 << " = " << beta(l) << " outside [" << floor << ", 1]";
            fail(ErrorKind::InvalidArgument, msg.str(), static_cast<int>(l));
        }
    }
}

// BandLimitedData

BandLimitedData::BandLimitedData(FrequencyBox box, CMatrix values, std::string preset)
    : box_(std::move(box)), values_(std::move(values)), preset_(std::move(preset)) {
    box_.validate();
    if (static_cast<std::size_t>(values_.rows()) != box_.node_count() || values_.cols() < 1)
        fail(ErrorKind::InvalidArgument, "spectrum table does not conform to the frequency grid");
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
        for (Eigen::Index k = 0; k < values_.cols(); ++k)
            if (!is_finite(values_(i, k))) fail(ErrorKind::NonFinite, "spectrum value is not finite");
}

BandLimitedData BandLimitedData::gaussian(const FrequencyBox& box, const RVector& center, double width,
                                          const CVector& amplitudes, bool mirror) {
    if (!(width > 0.0)) fail(ErrorKind::InvalidArgument, "gaussian width must be positive");
    return tabulate(box, amplitudes, mirror ? "gaussian-mirror" : "gaussian", [&](const RVector& xi) {
        const double r = distance(xi, center);
        CVector v = amplitudes * std::exp(-r * r / (2.0 * width * width));
        if (mirror) {
            const double s = distance(xi, -center);
            v += amplitudes.conjugate() * std::exp(-s * s / (2.0 * width * width));
        }
        return v;
    });
}

BandLimitedData BandLimitedData::raised_cosine(const FrequencyBox& box, const RVector& center,
                                               double radius, const CVector& amplitudes) {
    if (!(radius > 0.0)) fail(ErrorKind::InvalidArgument, "raised-cosine radius must be positive");
    return tabulate(box, amplitudes, "raised-cosine", [&](const RVector& xi) {
        const double r = distance(xi, center);
        const double w = r < radius ? 0.5 * (1.0 + std::cos(kPi * r / radius)) : 0.0;
        return CVector(amplitudes * w);
    });
}

BandLimitedData BandLimitedData::indicator_polynomial(const FrequencyBox& box, const RVector& center,
                                                      double half_width, const RVector& coefficients,
                                                      const CVector& amplitudes) {
    if (!(half_width > 0.0)) fail(ErrorKind::InvalidArgument, "indicator half-width must be positive");
    return tabulate(box, amplitudes, "indicator-polynomial", [&](const RVector& xi) {
        if (center.size() != xi.size())
            fail(ErrorKind::InvalidArgument, "preset center dimension differs from the frequency box");
        if ((xi - center).cwiseAbs().maxCoeff() > half_width) return CVector(CVector::Zero(amplitudes.size()));
        const double s = (xi - center).squaredNorm();
        double p = 0.0;
        for (Eigen::Index j = coefficients.size() - 1; j >= 0; --j) p = p * s + coefficients(j);
        return CVector(amplitudes * p);
    });
}

CVector BandLimitedData::at(const RVector& xi) const {
    if (xi.size() != box_.dim() || !box_.contains(xi)) {
        std::ostringstream msg;
        msg << "spectrum requested outside the frequency box at xi = " << xi.transpose();
        fail(ErrorKind::OutOfDomain, msg.str());
    }
    if (const auto node = box_.node_of(xi)) return at_node(*node);
    const int n = box_.dim();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int a = 0; a < n; ++a) {
        const double r = (xi(a) - box_.lower[a]) / box_.spacing(a);
        const int i = std::clamp(static_cast<int>(std::floor(r)), 0, box_.points[a] - 2);
        base[a] = i;
        frac[a] = std::clamp(r - i, 0.0, 1.0);
    }
    CVector out = CVector::Zero(values_.cols());
    for (int corner = 0; corner < (1 << n); ++corner) {
        std::vector<int> idx = base;
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            const bool up = (corner >> a) & 1;
            idx[a] += up;
            w *= up ? frac[a] : 1.0 - frac[a];
        }
        if (w != 0.0) out += w * values_.row(static_cast<Eigen::Index>(box_.flat_index(idx))).transpose();
    }
    return out;
}

BandLimitedData read_spectrum(const std::string& path, const FrequencyBox& box) {
    box.validate();
    const std::string text = detail::read_text_file(path);
    const std::size_t n = static_cast<std::size_t>(box.dim());
    if (text.rfind("FRACORDER_GRID01", 0) == 0) {
        const GridArray g = read_grid_binary(path);
        if (g.shape.size() != n + 1)
            fail(ErrorKind::IoError, "'" + path + "' must have shape [N_1..N_n, m]");
        for (std::size_t a = 0; a < n; ++a)
            if (g.shape[a] != static_cast<std::size_t>(box.points[a]))
                fail(ErrorKind::IoError, "'" + path + "' grid shape differs from the frequency box");
        const auto m = static_cast<Eigen::Index>(g.shape[n]);
        CMatrix values(static_cast<Eigen::Index>(box.node_count()), m);
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            for (Eigen::Index k = 0; k < m; ++k) values(i, k) = g.values[i * m + k];
        return BandLimitedData(box, std::move(values), "file");
    }
    const std::vector<std::string> lines = detail::csv_lines(text);
    if (lines.size() != box.node_count() + 1)
        fail(ErrorKind::IoError, "'" + path + "' needs a header and " + std::to_string(box.node_count()) +
                                     " rows");
    const std::size_t cols = detail::split_csv_line(lines[0]).size();
    if (cols <= n || (cols - n) % 2 != 0)
        fail(ErrorKind::IoError, "'" + path + "' header must list xi columns and re/im pairs");
    const auto m = static_cast<Eigen::Index>((cols - n) / 2);
    CMatrix values(static_cast<Eigen::Index>(box.node_count()), m);
    for (std::size_t i = 0; i < box.node_count(); ++i) {
        const std::vector<std::string> f = detail::split_csv_line(lines[i + 1]);
        const std::string where = path + " row " + std::to_string(i + 2);
        if (f.size() != cols) fail(ErrorKind::IoError, where + " has the wrong column count");
        const RVector node = box.node(i);
        for (std::size_t a = 0; a < n; ++a) {
            const double x = detail::parse_double(f[a], where);
            if (std::abs(x - node(static_cast<Eigen::Index>(a))) > 1e-9 * box.spacing(static_cast<int>(a)))
                fail(ErrorKind::IoError, where + " is not at the expected grid node");
        }
        for (Eigen::Index k = 0; k < m; ++k)
            values(static_cast<Eigen::Index>(i), k) =
                Complex(detail::parse_double(f[n + 2 * k], where), detail::parse_double(f[n + 2 * k + 1], where));
    }
    return BandLimitedData(box, std::move(values), "file");
}

void write_spectrum_binary(const std::string& path, const BandLimitedData& data) {
    GridArray g;
    for (int p : data.box().points) g.shape.push_back(static_cast<std::size_t>(p));
    g.shape.push_back(static_cast<std::size_t>(data.components()));
    g.values.reserve(data.values().size());
    for (Eigen::Index i = 0; i < data.values().rows(); ++i)
        for (Eigen::Index k = 0; k < data.values().cols(); ++k) g.values.push_back(data.values()(i, k));
    write_grid_binary(path, g);
}

void write_spectrum_csv(const std::string& path, const BandLimitedData& data) {
    const FrequencyBox& box = data.box();
    std::string out;
    for (int a = 0; a < box.dim(); ++a) out += (a ? ",xi_" : "xi_") + std::to_string(a + 1);
    for (int k = 0; k < data.components(); ++k)
        out += ",re_phi_" + std::to_string(k + 1) + ",im_phi_" + std::to_string(k + 1);
    out += "\n";
    for (std::size_t i = 0; i < box.node_count(); ++i) {
        const RVector xi = box.node(i);
        for (int a = 0; a < box.dim(); ++a) out += (a ? "," : "") + detail::format_double(xi(a));
        for (int k = 0; k < data.components(); ++k) {
            const Complex v = data.values()(static_cast<Eigen::Index>(i), k);
            out += "," + detail::format_double(v.real()) + "," + detail::format_double(v.imag());
        }
        out += "\n";
    }
    detail::write_file_atomic(path, out);
}

// Fourier-space solutions

CMatrix k_coeff(const Diagonalization& diag, const CVector& phi) {
    require_components(phi, diag);
    const CVector projected = diag.m * phi;
    return diag.m_inv * projected.asDiagonal();
}

CVector fourier_solution_caputo(const Diagonalization& diag, const CVector& phi, const VectorOrder& order,
                                double t, const MLRegimePolicy& policy) {
    require_order(order, diag);
    if (!(t >= 0.0) || !std::isfinite(t))
        fail(ErrorKind::InvalidTime, "Caputo solution needs a finite time t >= 0");
    const CMatrix k = k_coeff(diag, phi);
    CVector e(order.size());
    for (int l = 0; l < order.size(); ++l) {
        const double beta = order.beta(l);
        e(l) = ml_one(beta, diag.eigenvalues(l) * std::pow(t, beta), policy);
    }
    return k * e;
}

CVector fourier_solution_rl(const Diagonalization& diag, const CVector& phi, const VectorOrder& order,
                            double t, const MLRegimePolicy& policy) {
    require_order(order, diag);
    if (!(t > 0.0) || !std::isfinite(t))
        fail(ErrorKind::InvalidTime, "Riemann-Liouville solution needs a finite time t > 0");
    const CMatrix k = k_coeff(diag, phi);
    CVector e(order.size());
    for (int l = 0; l < order.size(); ++l) {
        const double beta = order.beta(l);
        e(l) = std::pow(t, beta - 1.0) * ml_two(beta, beta, diag.eigenvalues(l) * std::pow(t, beta), policy);
    }
    return k * e;
}

CVector fourier_solution(DerivativeKind kind, const Diagonalization& diag, const CVector& phi,
                         const VectorOrder& order, double t, const MLRegimePolicy& policy) {
    return kind == DerivativeKind::Caputo ? fourier_solution_caputo(diag, phi, order, t, policy)
                                          : fourier_solution_rl(diag, phi, order, t, policy);
}

CMatrix fourier_field(const MatrixSymbol& symbol, const BandLimitedData& data, const VectorOrder& order,
                      double t, DerivativeKind kind, int threads, const MLRegimePolicy& policy) {
    const FrequencyBox& box = data.box();
    if (data.components() != symbol.size())
        fail(ErrorKind::InvalidArgument, "spectrum and symbol sizes differ");
    CMatrix field(static_cast<Eigen::Index>(box.node_count()), data.components());
    parallel_for(box.node_count(), threads, [&](std::size_t i) {
        const Diagonalization diag = diagonalize(symbol, box.node(i));
        field.row(static_cast<Eigen::Index>(i)) =
            fourier_solution(kind, diag, data.at_node(i), order, t, policy).transpose();
    });
    return field;
}

SpatialValue spatial_from_field(const FrequencyBox& box, const CMatrix& field, const RVector& x) {
    const int n = box.dim();
    if (n > 3) fail(ErrorKind::InvalidArgument, "spatial reconstruction supports n <= 3");
    if (x.size() != n) fail(ErrorKind::InvalidArgument, "x must have one component per frequency axis");
    if (static_cast<std::size_t>(field.rows()) != box.node_count())
        fail(ErrorKind::InvalidArgument, "field does not conform to the frequency grid");

    std::vector<std::vector<double>> fine(n), coarse(n);
    for (int a = 0; a < n; ++a) {
        const int np = box.points[a];
        const double h = box.spacing(a);
        fine[a].assign(np, h);
        fine[a].front() = fine[a].back() = 0.5 * h;
        std::vector<int> kept;
        for (int i = 0; i < np; i += 2) kept.push_back(i);
        if (kept.back() != np - 1) kept.push_back(np - 1);
        coarse[a].assign(np, 0.0);
        for (std::size_t s = 0; s < kept.size(); ++s) {
            const double left = s > 0 ? box.coordinate(a, kept[s]) - box.coordinate(a, kept[s - 1]) : 0.0;
            const double right =
                s + 1 < kept.size() ? box.coordinate(a, kept[s + 1]) - box.coordinate(a, kept[s]) : 0.0;
            coarse[a][kept[s]] = 0.5 * (left + right);
        }
    }

    CVector sum_fine = CVector::Zero(field.cols());
    CVector sum_coarse = CVector::Zero(field.cols());
    for (std::size_t i = 0; i < box.node_count(); ++i) {
        const std::vector<int> idx = box.multi_index(i);
        const RVector xi = box.node(i);
        double wf = 1.0, wc = 1.0;
        for (int a = 0; a < n; ++a) {
            wf *= fine[a][idx[a]];
            wc *= coarse[a][idx[a]];
        }
        const Complex phase = std::polar(1.0, x.dot(xi));
        const CVector term = field.row(static_cast<Eigen::Index>(i)).transpose() * phase;
        sum_fine += wf * term;
        if (wc != 0.0) sum_coarse += wc * term;
    }
    const double norm = std::pow(2.0 * kPi, -n);
    SpatialValue out;
    out.u = norm * sum_fine;
    out.error_estimate = norm * (sum_fine - sum_coarse).cwiseAbs().maxCoeff();
    return out;
}

SpatialValue spatial_solution(const MatrixSymbol& symbol, const BandLimitedData& data, const VectorOrder& order,
                              double t, const RVector& x, DerivativeKind kind, int threads,
                              const MLRegimePolicy& policy) {
    if (data.box().dim() > 3) fail(ErrorKind::InvalidArgument, "spatial reconstruction supports n <= 3");
    return spatial_from_field(data.box(), fourier_field(symbol, data, order, t, kind, threads, policy), x);
}

// Observations

PointData point_data(const MatrixSymbol& symbol, const BandLimitedData& data, const RVector& xi0) {
    const FrequencyBox& box = data.box();
    if (xi0.size() != box.dim() || !box.contains(xi0)) {
        std::ostringstream msg;
        msg << "xi0 = (" << xi0.transpose() << ") lies outside the frequency box";
        fail(ErrorKind::OutOfDomain, msg.str());
    }
    if (data.components() != symbol.size())
        fail(ErrorKind::InvalidArgument, "spectrum and symbol sizes differ");
    PointData p;
    if (const auto node = box.node_of(xi0)) {
        p.xi = box.node(*node);
        p.phi = data.at_node(*node);
        p.on_node = true;
    } else {
        if (symbol.kind() == SymbolKind::Tabulated)
            fail(ErrorKind::OutOfDomain, "tabulated symbols need xi0 on a grid node");
        p.xi = xi0;
        p.phi = data.at(xi0);
    }
    p.diag = diagonalize(symbol, p.xi);
    return p;
}

ObservationRecord observe(const MatrixSymbol& symbol, const BandLimitedData& data, const VectorOrder& order,
                          double t0, const RVector& xi0, DerivativeKind kind, const MLRegimePolicy& policy) {
    if (!(t0 >= 1.0) || !std::isfinite(t0))
        fail(ErrorKind::InvalidTime, "observation time t0 must be finite and >= 1");
    const PointData p = point_data(symbol, data, xi0);
    ObservationRecord r;
    r.t0 = t0;
    r.xi0 = p.xi;
    r.kind = kind;
    r.d = fourier_solution(kind, p.diag, p.phi, order, t0, policy);
    std::ostringstream note;
    note << "forward " << to_string(kind) << " order=[";
    for (int l = 0; l < order.size(); ++l) note << (l ? "," : "") << detail::format_double(order.beta(l));
    note << "] symbol=" << symbol.name() << " data=" << data.preset() << (p.on_node ? " node" : " interpolated");
    r.note = note.str();
    return r;
}

std::string observations_to_csv(const std::vector<ObservationRecord>& records) {
    std::size_t n = records.empty() ? 1 : static_cast<std::size_t>(records.front().xi0.size());
    std::size_t m = records.empty() ? 1 : static_cast<std::size_t>(records.front().d.size());
    std::string out = "t0";
    for (std::size_t a = 0; a < n; ++a) out += ",xi0_" + std::to_string(a + 1);
    out += ",kind";
    for (std::size_t j = 0; j < m; ++j) out += ",re_d" + std::to_string(j + 1) + ",im_d" + std::to_string(j + 1);
    out += "\n";
    for (const ObservationRecord& r : records) {
        if (static_cast<std::size_t>(r.xi0.size()) != n || static_cast<std::size_t>(r.d.size()) != m)
            fail(ErrorKind::InvalidArgument, "observation batch mixes dimensions");
        out += detail::format_double(r.t0);
        for (Eigen::Index a = 0; a < r.xi0.size(); ++a) out += "," + detail::format_double(r.xi0(a));
        out += "," + to_string(r.kind);
        for (Eigen::Index j = 0; j < r.d.size(); ++j)
            out += "," + detail::format_double(r.d(j).real()) + "," + detail::format_double(r.d(j).imag());
        out += "\n";
    }
    return out;
}

std::vector<ObservationRecord> observations_from_csv(const std::string& text) {
    const std::vector<std::string> lines = detail::csv_lines(text);
    if (lines.empty()) fail(ErrorKind::IoError, "observation CSV has no header");
    const std::vector<std::string> header = detail::split_csv_line(lines[0]);
    std::size_t kind_col = 0;
    while (kind_col < header.size() && header[kind_col] != "kind") ++kind_col;
    if (header.empty() || header[0] != "t0" || kind_col == header.size() || kind_col < 2 ||
        (header.size() - kind_col - 1) % 2 != 0 || header.size() == kind_col + 1)
        fail(ErrorKind::IoError, "observation CSV header must be t0,xi0_1..,kind,re_d1,im_d1,..");
    const std::size_t n = kind_col - 1;
    const std::size_t m = (header.size() - kind_col - 1) / 2;
    std::vector<ObservationRecord> out;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const std::vector<std::string> f = detail::split_csv_line(lines[row]);
        const std::string where = "observation CSV row " + std::to_string(row + 1);
        if (f.size() != header.size()) fail(ErrorKind::IoError, where + " has the wrong column count");
        ObservationRecord r;
        r.t0 = detail::parse_double(f[0], where);
        r.xi0.resize(static_cast<Eigen::Index>(n));
        for (std::size_t a = 0; a < n; ++a) r.xi0(static_cast<Eigen::Index>(a)) = detail::parse_double(f[1 + a], where);
        try {
            r.kind = parse_derivative_kind(f[kind_col]);
        } catch (const Error& e) {
            fail(ErrorKind::IoError, where + ": " + e.what());
        }
        r.d.resize(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j)
            r.d(static_cast<Eigen::Index>(j)) = Complex(detail::parse_double(f[kind_col + 1 + 2 * j], where),
                                                        detail::parse_double(f[kind_col + 2 + 2 * j], where));
        out.push_back(std::move(r));
    }
    return out;
}

std::string observations_to_json(const std::vector<ObservationRecord>& records) {
    detail::Json list = detail::Json::array();
    for (const ObservationRecord& r : records) {
        detail::Json rec;
        rec["t0"] = r.t0;
        detail::Json xi = detail::Json::array();
        for (Eigen::Index a = 0; a < r.xi0.size(); ++a) xi.push_back(r.xi0(a));
        rec["xi0"] = xi;
        rec["kind"] = to_string(r.kind);
        detail::Json d = detail::Json::array();
        for (Eigen::Index j = 0; j < r.d.size(); ++j) d.push_back(detail::complex_json(r.d(j).real(), r.d(j).imag()));
        rec["d"] = d;
        rec["note"] = r.note;
        list.push_back(rec);
    }
    detail::Json doc;
    doc["schema"] = "fracorder-observations/1";
    doc["records"] = list;
    return detail::dump_json(doc);
}

namespace {

double json_number(const detail::Json& v, const std::string& what) {
    if (!v.is_number()) fail(ErrorKind::IoError, "observation field '" + what + "' must be a number");
    return v.get<double>();
}

}  // namespace

std::vector<ObservationRecord> observations_from_json(const std::string& text) {
    detail::Json doc;
    try {
        doc = detail::Json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::IoError, std::string("observation JSON does not parse: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != "fracorder-observations/1" ||
        !doc.contains("records") || !doc["records"].is_array())
        fail(ErrorKind::IoError, "observation JSON needs schema fracorder-observations/1 and a records array");
    std::vector<ObservationRecord> out;
    for (const detail::Json& rec : doc["records"]) {
        if (!rec.is_object() || !rec.contains("t0") || !rec.contains("xi0") || !rec.contains("d") ||
            !rec.contains("kind"))
            fail(ErrorKind::IoError, "observation record needs t0, xi0, kind and d");
        ObservationRecord r;
        r.t0 = json_number(rec["t0"], "t0");
        if (!rec["xi0"].is_array() || !rec["d"].is_array())
            fail(ErrorKind::IoError, "observation xi0 and d must be arrays");
        r.xi0.resize(static_cast<Eigen::Index>(rec["xi0"].size()));
        for (std::size_t a = 0; a < rec["xi0"].size(); ++a)
            r.xi0(static_cast<Eigen::Index>(a)) = json_number(rec["xi0"][a], "xi0");
        if (!rec["kind"].is_string()) fail(ErrorKind::IoError, "observation kind must be a string");
        try {
            r.kind = parse_derivative_kind(rec["kind"].get<std::string>());
        } catch (const Error& e) {
            fail(ErrorKind::IoError, e.what());
        }
        r.d.resize(static_cast<Eigen::Index>(rec["d"].size()));
        for (std::size_t j = 0; j < rec["d"].size(); ++j) {
            const detail::Json& v = rec["d"][j];
            if (v.is_number()) {
                r.d(static_cast<Eigen::Index>(j)) = json_number(v, "d");
            } else if (v.is_array() && v.size() == 2) {
                r.d(static_cast<Eigen::Index>(j)) = Complex(json_number(v[0], "d"), json_number(v[1], "d"));
            } else {
                fail(ErrorKind::IoError, "observation d entries must be numbers or [re, im] pairs");
            }
        }
        if (rec.contains("note") && rec["note"].is_string()) r.note = rec["note"].get<std::string>();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ObservationRecord> read_observations(const std::string& path) {
    const std::string text = detail::read_text_file(path);
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
        return observations_from_json(text);
    return observations_from_csv(text);
}

void write_observations(const std::string& path, const std::vector<ObservationRecord>& records) {
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    detail::write_file_atomic(path, csv ? observations_to_csv(records) : observations_to_json(records));
}

}  // namespace fracorder
