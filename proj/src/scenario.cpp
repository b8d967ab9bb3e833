#include "fracorder/scenario.hpp"

#include <filesystem>
#include <set>

#include "io_util.hpp"
#include "json_out.hpp"

namespace fracorder {

namespace {

using detail::Json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    fail(ErrorKind::ScenarioError, where + ": " + what);
}

void only_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(where, "must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) bad(where, "unknown key '" + it.key() + "'");
}

const Json& need(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) bad(where, "missing key '" + key + "'");
    return obj.at(key);
}

double number(const Json& v, const std::string& where) {
    if (!v.is_number()) bad(where, "must be a number");
    return v.get<double>();
}

int integer(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) bad(where, "must be an integer");
    return v.get<int>();
}

Complex complex_value(const Json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Complex(v[0].get<double>(), v[1].get<double>());
    bad(where, "must be a number or an [re, im] pair");
}

std::vector<double> numbers(const Json& v, const std::string& where) {
    if (!v.is_array()) bad(where, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

RVector rvector(const Json& v, const std::string& where) {
    const std::vector<double> x = numbers(v, where);
    return Eigen::Map<const RVector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

CVector cvector(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) bad(where, "must be a non-empty array");
    CVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = complex_value(v[i], where + "[" + std::to_string(i) + "]");
    return out;
}

std::string resolve(const std::string& base, const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

FrequencyBox parse_box(const Json& v) {
    const std::string where = "frequency_box";
    only_keys(v, where, {"lower", "upper", "points"});
    FrequencyBox box;
    box.lower = numbers(need(v, "lower", where), where + ".lower");
    box.upper = numbers(need(v, "upper", where), where + ".upper");
    const Json& pts = need(v, "points", where);
    if (!pts.is_array()) bad(where + ".points", "must be an array of integers");
    for (std::size_t i = 0; i < pts.size(); ++i) box.points.push_back(integer(pts[i], where + ".points"));
    try {
        box.validate();
    } catch (const Error& e) {
        bad(where, e.detail());
    }
    return box;
}

// A term is [multi-index, coefficient].
Polynomial parse_polynomial(const Json& v, const std::string& where) {
    if (!v.is_array()) bad(where, "must be an array of [exponents, coefficient] terms");
    Polynomial p;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        const Json& t = v[i];
        if (!t.is_array() || t.size() != 2 || !t[0].is_array()) bad(w, "term must be [exponents, coefficient]");
        Monomial m;
        for (std::size_t a = 0; a < t[0].size(); ++a) {
            const int e = integer(t[0][a], w);
            if (e < 0) bad(w, "exponents must be non-negative");
            m.exponents.push_back(e);
        }
        m.coefficient = complex_value(t[1], w);
        p.push_back(std::move(m));
    }
    return p;
}

PolynomialMatrix parse_poly_matrix(const Json& v, int m, const std::string& where) {
    if (!v.is_array() || static_cast<int>(v.size()) != m) bad(where, "must have " + std::to_string(m) + " rows");
    PolynomialMatrix out{m, m, {}};
    for (int j = 0; j < m; ++j) {
        const Json& row = v[j];
        if (!row.is_array() || static_cast<int>(row.size()) != m)
            bad(where, "row " + std::to_string(j + 1) + " must have " + std::to_string(m) + " entries");
        for (int k = 0; k < m; ++k)
            out.entries.push_back(
                parse_polynomial(row[k], where + "[" + std::to_string(j) + "][" + std::to_string(k) + "]"));
    }
    return out;
}

MatrixSymbol parse_symbol(const Json& v, const FrequencyBox& box, const std::string& base) {
    const std::string where = "symbol";
    if (!v.is_object()) bad(where, "must be an object");
    const Json& kind = need(v, "kind", where);
    if (!kind.is_string()) bad(where + ".kind", "must be a string");
    const std::string k = kind.get<std::string>();
    MatrixSymbol s;
    try {
        if (k == "builtin") {
            only_keys(v, where, {"kind", "name"});
            const Json& name = need(v, "name", where);
            if (!name.is_string() || name.get<std::string>() != "example-sec4")
                bad(where + ".name", "the only builtin symbol is 'example-sec4'");
            s = MatrixSymbol::builtin_example();
        } else if (k == "polynomial") {
            only_keys(v, where, {"kind", "m", "entries", "factorization"});
            const int m = integer(need(v, "m", where), where + ".m");
            if (m < 1) bad(where + ".m", "must be positive");
            PolynomialMatrix entries = parse_poly_matrix(need(v, "entries", where), m, where + ".entries");
            std::optional<SymbolFactorization> factors;
            if (v.contains("factorization")) {
                const Json& f = v["factorization"];
                const std::string fw = where + ".factorization";
                only_keys(f, fw, {"M", "M_inv", "eigenvalues"});
                SymbolFactorization sf;
                sf.m = parse_poly_matrix(need(f, "M", fw), m, fw + ".M");
                sf.m_inv = parse_poly_matrix(need(f, "M_inv", fw), m, fw + ".M_inv");
                const Json& ev = need(f, "eigenvalues", fw);
                if (!ev.is_array() || static_cast<int>(ev.size()) != m)
                    bad(fw + ".eigenvalues", "must list " + std::to_string(m) + " polynomials");
                for (int l = 0; l < m; ++l)
                    sf.eigenvalues.push_back(parse_polynomial(ev[l], fw + ".eigenvalues[" + std::to_string(l) + "]"));
                factors = std::move(sf);
            }
            s = MatrixSymbol::polynomial(std::move(entries), std::move(factors));
        } else if (k == "tabulated") {
            only_keys(v, where, {"kind", "file", "format", "m"});
            const Json& file = need(v, "file", where);
            if (!file.is_string()) bad(where + ".file", "must be a path string");
            const std::string path = resolve(base, file.get<std::string>());
            const std::string format = v.value("format", "csv");
            if (format == "csv") {
                s = read_symbol_csv(path, box, integer(need(v, "m", where), where + ".m"));
            } else if (format == "binary") {
                s = read_symbol_binary(path, box);
            } else {
                bad(where + ".format", "must be 'csv' or 'binary'");
            }
        } else {
            bad(where + ".kind", "must be 'builtin', 'polynomial' or 'tabulated'");
        }
        s.set_domain(box);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ScenarioError || e.kind() == ErrorKind::IoError) throw;
        bad(where, e.detail());
    }
    return s;
}

BandLimitedData parse_data(const Json& v, const FrequencyBox& box, const std::string& base) {
    const std::string where = "initial_data";
    if (!v.is_object()) bad(where, "must be an object");
    try {
        if (v.contains("file")) {
            only_keys(v, where, {"file"});
            if (!v["file"].is_string()) bad(where + ".file", "must be a path string");
            return read_spectrum(resolve(base, v["file"].get<std::string>()), box);
        }
        const Json& preset = need(v, "preset", where);
        if (!preset.is_string()) bad(where + ".preset", "must be a string");
        const std::string p = preset.get<std::string>();
        if (p == "gaussian") {
            only_keys(v, where, {"preset", "center", "width", "amplitudes", "mirror"});
            bool mirror = false;
            if (v.contains("mirror")) {
                if (!v["mirror"].is_boolean()) bad(where + ".mirror", "must be a boolean");
                mirror = v["mirror"].get<bool>();
            }
            return BandLimitedData::gaussian(box, rvector(need(v, "center", where), where + ".center"),
                                             number(need(v, "width", where), where + ".width"),
                                             cvector(need(v, "amplitudes", where), where + ".amplitudes"), mirror);
        }
        if (p == "raised-cosine") {
            only_keys(v, where, {"preset", "center", "radius", "amplitudes"});
            return BandLimitedData::raised_cosine(box, rvector(need(v, "center", where), where + ".center"),
                                                  number(need(v, "radius", where), where + ".radius"),
                                                  cvector(need(v, "amplitudes", where), where + ".amplitudes"));
        }
        if (p == "indicator-polynomial") {
            only_keys(v, where, {"preset", "center", "half_width", "coefficients", "amplitudes"});
            return BandLimitedData::indicator_polynomial(
                box, rvector(need(v, "center", where), where + ".center"),
                number(need(v, "half_width", where), where + ".half_width"),
                rvector(need(v, "coefficients", where), where + ".coefficients"),
                cvector(need(v, "amplitudes", where), where + ".amplitudes"));
        }
        bad(where + ".preset", "must be 'gaussian', 'raised-cosine' or 'indicator-polynomial'");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ScenarioError || e.kind() == ErrorKind::IoError) throw;
        bad(where, e.detail());
    }
}

void parse_tolerances(const Json& v, InverseTolerances& tol) {
    const std::string where = "tolerances";
    only_keys(v, where,
              {"beta_tol", "residual_rel", "det_rel", "max_k_condition", "range_slack", "certificate_samples",
               "strict_margin", "max_doublings", "series_radius", "series_tol", "contour_nodes",
               "contour_epsilon_fraction", "contour_tol"});
    auto num = [&](const char* key, double& dst) {
        if (v.contains(key)) dst = number(v[key], where + "." + key);
    };
    auto whole = [&](const char* key, int& dst) {
        if (v.contains(key)) dst = integer(v[key], where + "." + key);
    };
    num("beta_tol", tol.beta_tol);
    num("residual_rel", tol.residual_rel);
    num("det_rel", tol.det_rel);
    num("max_k_condition", tol.max_k_condition);
    num("range_slack", tol.range_slack);
    whole("certificate_samples", tol.certificate_samples);
    num("strict_margin", tol.strict_margin);
    whole("max_doublings", tol.max_doublings);
    num("series_radius", tol.ml.series_radius);
    num("series_tol", tol.ml.series_tol);
    whole("contour_nodes", tol.ml.contour_nodes);
    num("contour_epsilon_fraction", tol.ml.contour_epsilon_fraction);
    num("contour_tol", tol.ml.contour_tol);
    try {
        tol.validate();
    } catch (const Error& e) {
        bad(where, e.detail());
    }
}

}  // namespace

const BandLimitedData& Scenario::spectrum() const {
    if (!data) fail(ErrorKind::ScenarioError, "scenario has no initial_data");
    return *data;
}

VectorOrder Scenario::vector_order() const {
    if (!order) fail(ErrorKind::ScenarioError, "scenario has no order (needed for forward runs)");
    VectorOrder o;
    o.beta = *order;
    o.floor = beta0;
    return o;
}

const RVector& Scenario::observation_point() const {
    if (!xi0) fail(ErrorKind::ScenarioError, "scenario has no xi0");
    return *xi0;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::ScenarioError, std::string("scenario is not valid JSON: ") + e.what());
    }
    only_keys(doc, "scenario",
              {"schema", "frequency_box", "symbol", "initial_data", "kind", "order", "beta0", "t0", "xi0", "times",
               "x_points", "tolerances"});
    const Json& schema = need(doc, "schema", "scenario");
    if (!schema.is_string() || schema.get<std::string>() != kScenarioSchema)
        bad("scenario.schema", std::string("must be '") + kScenarioSchema + "'");

    Scenario s;
    s.box = parse_box(need(doc, "frequency_box", "scenario"));
    s.symbol = parse_symbol(need(doc, "symbol", "scenario"), s.box, base_dir);
    s.data = parse_data(need(doc, "initial_data", "scenario"), s.box, base_dir);
    if (s.data->components() != s.symbol.size())
        bad("initial_data", "has " + std::to_string(s.data->components()) + " components, the symbol is " +
                                std::to_string(s.symbol.size()) + "x" + std::to_string(s.symbol.size()));

    if (doc.contains("kind")) {
        if (!doc["kind"].is_string()) bad("kind", "must be 'caputo' or 'rl'");
        try {
            s.kind = parse_derivative_kind(doc["kind"].get<std::string>());
        } catch (const Error& e) {
            bad("kind", e.detail());
        }
    }
    if (doc.contains("beta0")) {
        s.beta0 = number(doc["beta0"], "beta0");
        if (!(s.beta0 > 0.0 && s.beta0 < 1.0)) bad("beta0", "must lie in (0, 1)");
    }
    if (doc.contains("order")) {
        s.order = rvector(doc["order"], "order");
        if (s.order->size() != s.symbol.size())
            bad("order", "must have " + std::to_string(s.symbol.size()) + " components");
        try {
            s.vector_order().validate();
        } catch (const Error& e) {
            bad("order", e.detail());
        }
    }
    if (doc.contains("t0")) {
        const Json& t = doc["t0"];
        if (t.is_string()) {
            if (t.get<std::string>() != "auto") bad("t0", "must be a number >= 1 or \"auto\"");
        } else {
            s.t0 = number(t, "t0");
            if (!(*s.t0 >= 1.0)) bad("t0", "must be >= 1");
        }
    }
    if (doc.contains("xi0")) {
        s.xi0 = rvector(doc["xi0"], "xi0");
        if (s.xi0->size() != s.box.dim()) bad("xi0", "must have one component per frequency axis");
    }
    if (doc.contains("times")) {
        s.times = numbers(doc["times"], "times");
        for (double t : s.times)
            if (!(t >= 0.0) || !std::isfinite(t)) bad("times", "entries must be finite and >= 0");
    }
    if (doc.contains("x_points")) {
        const Json& xs = doc["x_points"];
        if (!xs.is_array()) bad("x_points", "must be an array of points");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            RVector x = rvector(xs[i], "x_points[" + std::to_string(i) + "]");
            if (x.size() != s.box.dim()) bad("x_points", "points need one component per frequency axis");
            s.x_points.push_back(std::move(x));
        }
    }
    if (doc.contains("tolerances")) parse_tolerances(doc["tolerances"], s.tolerances);
    return s;
}

Scenario load_scenario(const std::string& path) {
    const std::string text = detail::read_text_file(path);
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    return parse_scenario(text, parent.empty() ? "." : parent.string());
}

std::string example_scenario_json() {
    Json doc;
    doc["schema"] = kScenarioSchema;
    doc["frequency_box"] = {{"lower", {-4.0}}, {"upper", {4.0}}, {"points", {161}}};
    doc["symbol"] = {{"kind", "builtin"}, {"name", "example-sec4"}};
    doc["initial_data"] = {{"preset", "gaussian"},
                           {"center", {2.0}},
                           {"width", 0.5},
                           {"amplitudes", {1.0, 2.0}},
                           {"mirror", false}};
    doc["kind"] = "caputo";
    doc["order"] = {0.4, 0.85};
    doc["beta0"] = 0.1;
    doc["t0"] = "auto";
    doc["xi0"] = {2.0};
    doc["times"] = {0.0, 0.5, 1.0, 5.0};
    doc["x_points"] = Json::array({Json::array({0.0}), Json::array({1.0})});
    return detail::dump_json(doc);
}

}  // namespace fracorder
