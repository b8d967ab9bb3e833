#include "fracorder/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "fracorder/forward.hpp"
#include "fracorder/inverse.hpp"
#include "fracorder/mittag_leffler.hpp"
#include "fracorder/scenario.hpp"
#include "io_util.hpp"
#include "json_out.hpp"

namespace fracorder {

namespace {

using detail::format_double;
using detail::Json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void setup_logging() {
    auto logger = spdlog::stderr_logger_st("fracorder");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FRACORDER_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off")
            spdlog::warn("FRACORDER_LOG='{}' is not a level, keeping 'warn'", env);
        else
            spdlog::set_level(level);
    }
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
    } else {
        detail::write_file_atomic(out_path, content);
        spdlog::info("wrote {}", out_path);
    }
}

Json cjson(Complex z) { return detail::complex_json(z.real(), z.imag()); }

Json rjson(const RVector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json signed_log_json(const SignedLog& s) { return Json{{"sign", s.sign}, {"log_abs", s.log_abs}}; }

Json conditions_json(const ConditionReport& r) {
    Json modes = Json::array();
    for (std::size_t l = 0; l < r.modes.size(); ++l) {
        const ModeCondition& c = r.modes[l];
        Json m;
        m["index"] = static_cast<int>(l + 1);
        m["lambda"] = cjson(c.lambda);
        m["arg"] = c.arg;
        m["spectral_margin"] = c.spectral_margin;
        m["spectral_ok"] = c.spectral_ok;
        if (c.sign_ok) {
            m["sign_margin"] = *c.sign_margin;
            m["sign_ok"] = *c.sign_ok;
        }
        modes.push_back(m);
    }
    Json degenerate = Json::array();
    for (const auto& [a, b] : r.degenerate) degenerate.push_back(Json::array({a + 1, b + 1}));
    Json out;
    out["kind"] = to_string(r.kind);
    out["margin_tol"] = r.margin_tol;
    out["modes"] = modes;
    out["degenerate_pairs"] = degenerate;
    out["all_ok"] = r.all_ok();
    return out;
}

Json certificate_json(const MonotonicityCertificate& c) {
    Json out;
    out["lambda"] = cjson(c.lambda);
    out["kind"] = to_string(c.kind);
    out["t0"] = c.t0;
    out["beta0"] = c.beta0;
    out["samples"] = c.samples;
    out["pass"] = c.pass;
    if (c.first_violation) out["first_violation"] = *c.first_violation;
    if (!c.reason.empty()) out["reason"] = c.reason;
    if (c.pass) {
        out["r_one"] = signed_log_json(c.r_one);
        out["r_beta0"] = signed_log_json(c.r_floor);
    }
    return out;
}

Json tolerances_json(const InverseTolerances& t) {
    Json out;
    out["beta_tol"] = t.beta_tol;
    out["residual_rel"] = t.residual_rel;
    out["det_rel"] = t.det_rel;
    out["max_k_condition"] = t.max_k_condition;
    out["range_slack"] = t.range_slack;
    out["certificate_samples"] = t.certificate_samples;
    out["strict_margin"] = t.strict_margin;
    out["max_doublings"] = t.max_doublings;
    out["series_radius"] = t.ml.series_radius;
    out["series_tol"] = t.ml.series_tol;
    out["contour_nodes"] = t.ml.contour_nodes;
    out["contour_epsilon_fraction"] = t.ml.contour_epsilon_fraction;
    out["contour_tol"] = t.ml.contour_tol;
    return out;
}

Json recovery_json(const RecoveryResult& r) {
    Json out;
    out["kind"] = to_string(r.kind);
    out["t0"] = r.t0;
    out["xi0"] = rjson(r.xi0);
    out["xi0_on_node"] = r.xi0_on_node;
    out["beta0"] = r.order.floor;
    out["order"] = rjson(r.order.beta);
    Json modes = Json::array();
    for (std::size_t i = 0; i < r.modes.size(); ++i) {
        const OrderRecovery& m = r.modes[i];
        const ScalarTarget& s = r.targets[i];
        Json j;
        j["index"] = m.index + 1;
        j["lambda"] = cjson(s.lambda);
        j["b"] = cjson(s.b);
        j["sign_factor"] = s.sign_factor;
        j["range"] = Json::array({s.r_one, s.r_floor});
        j["beta"] = m.beta;
        j["iterations"] = m.iterations;
        j["bracket"] = Json::array({m.bracket_lo, m.bracket_hi});
        j["real_residual"] = m.real_residual;
        j["complex_residual"] = m.complex_residual;
        j["residual_tol"] = m.residual_tol;
        j["clamped"] = m.clamped;
        j["at_right_endpoint"] = m.at_right_endpoint;
        j["certificate"] = certificate_json(r.certificates[i]);
        modes.push_back(j);
    }
    out["modes"] = modes;
    Json k = Json::array();
    for (Eigen::Index a = 0; a < r.k.k.rows(); ++a) {
        Json row = Json::array();
        for (Eigen::Index b = 0; b < r.k.k.cols(); ++b) row.push_back(cjson(r.k.k(a, b)));
        k.push_back(row);
    }
    out["k_matrix"] = {{"entries", k},
                       {"det", cjson(r.k.det)},
                       {"det_tol", r.k.det_tol},
                       {"condition", r.k.condition},
                       {"well_posed", r.k.well_posed}};
    out["conditions"] = conditions_json(r.conditions);
    out["tolerances"] = tolerances_json(r.tolerances);
    return out;
}

DerivativeKind effective_kind(const Scenario& s, const std::string& flag) {
    if (flag.empty()) return s.kind;
    try {
        return parse_derivative_kind(flag);
    } catch (const Error& e) {
        throw UsageError(e.detail());
    }
}

std::vector<Complex> lambdas_at(const Scenario& s) {
    const PointData p = point_data(s.symbol, s.spectrum(), s.observation_point());
    return {p.diag.eigenvalues.data(), p.diag.eigenvalues.data() + p.diag.eigenvalues.size()};
}

double resolve_t0(const Scenario& s, DerivativeKind kind) {
    if (s.t0) return *s.t0;
    const double t0 = suggest_observation_time(kind, s.beta0, lambdas_at(s), s.tolerances);
    spdlog::info("certified observation time t0 = {}", format_double(t0));
    return t0;
}

// ml-eval

int cmd_ml_eval(double alpha, double beta, const std::vector<std::string>& zs, const std::string& out_path) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("--alpha must lie in (0, 1]");
    if (!(beta > 0.0)) throw UsageError("--beta must be positive");
    if (zs.empty()) throw UsageError("give at least one --z");
    std::vector<Complex> points;
    for (const std::string& z : zs) {
        try {
            points.push_back(parse_complex(z));
        } catch (const Error& e) {
            throw UsageError(e.detail());
        }
    }
    std::string out = "alpha,beta,re_z,im_z,re_value,im_value,regime,error_estimate\n";
    for (Complex z : points) {
        const MLEvaluation e = ml_evaluate(alpha, beta, z);
        out += format_double(alpha) + "," + format_double(beta) + "," + format_double(z.real()) + "," +
               format_double(z.imag()) + "," + format_double(e.value.real()) + "," + format_double(e.value.imag()) +
               "," + to_string(e.regime) + "," + format_double(e.error_estimate) + "\n";
    }
    emit(out_path, out);
    return 0;
}

// forward

int cmd_forward(const Scenario& s, DerivativeKind kind, int threads, const std::string& out_path,
                const std::string& spatial_path) {
    const BandLimitedData& data = s.spectrum();
    const VectorOrder order = s.vector_order();
    const int m = s.symbol.size();
    std::string out = "t";
    for (int a = 0; a < s.box.dim(); ++a) out += ",xi_" + std::to_string(a + 1);
    for (int j = 0; j < m; ++j) out += ",re_u" + std::to_string(j + 1) + ",im_u" + std::to_string(j + 1);
    out += "\n";
    std::string spatial = "t";
    for (int a = 0; a < s.box.dim(); ++a) spatial += ",x_" + std::to_string(a + 1);
    for (int j = 0; j < m; ++j) spatial += ",re_u" + std::to_string(j + 1) + ",im_u" + std::to_string(j + 1);
    spatial += ",error_estimate\n";
    if (!spatial_path.empty() && s.x_points.empty())
        fail(ErrorKind::ScenarioError, "--spatial-out needs x_points in the scenario");

    for (double t : s.times) {
        const CMatrix field = fourier_field(s.symbol, data, order, t, kind, threads, s.tolerances.ml);
        for (std::size_t i = 0; i < s.box.node_count(); ++i) {
            const RVector xi = s.box.node(i);
            out += format_double(t);
            for (Eigen::Index a = 0; a < xi.size(); ++a) out += "," + format_double(xi(a));
            for (int j = 0; j < m; ++j) {
                const Complex u = field(static_cast<Eigen::Index>(i), j);
                out += "," + format_double(u.real()) + "," + format_double(u.imag());
            }
            out += "\n";
        }
        if (!spatial_path.empty()) {
            for (const RVector& x : s.x_points) {
                const SpatialValue v = spatial_from_field(s.box, field, x);
                spatial += format_double(t);
                for (Eigen::Index a = 0; a < x.size(); ++a) spatial += "," + format_double(x(a));
                for (int j = 0; j < m; ++j)
                    spatial += "," + format_double(v.u(j).real()) + "," + format_double(v.u(j).imag());
                spatial += "," + format_double(v.error_estimate) + "\n";
            }
        }
        spdlog::info("forward t = {} done", format_double(t));
    }
    emit(out_path, out);
    if (!spatial_path.empty()) emit(spatial_path, spatial);
    return 0;
}

// observe

int cmd_observe(const Scenario& s, DerivativeKind kind, const std::string& out_path) {
    const double t0 = resolve_t0(s, kind);
    const ObservationRecord r =
        observe(s.symbol, s.spectrum(), s.vector_order(), t0, s.observation_point(), kind, s.tolerances.ml);
    const bool csv = out_path.size() >= 4 && out_path.compare(out_path.size() - 4, 4, ".csv") == 0;
    emit(out_path, csv ? observations_to_csv({r}) : observations_to_json({r}));
    return 0;
}

// invert

int cmd_invert(const Scenario& s, DerivativeKind kind, const std::string& obs_path, bool suggest,
               const std::string& out_path) {
    if (suggest) {
        const std::vector<Complex> lambdas = lambdas_at(s);
        const double t0 = suggest_observation_time(kind, s.beta0, lambdas, s.tolerances);
        std::cout << "t0 = " << format_double(t0) << "\n";
        if (!out_path.empty()) {
            Json doc;
            doc["schema"] = "fracorder-t0/1";
            doc["kind"] = to_string(kind);
            doc["beta0"] = s.beta0;
            doc["start"] = observation_time_start(kind, s.beta0);
            doc["t0"] = t0;
            Json ls = Json::array();
            for (Complex l : lambdas) ls.push_back(cjson(l));
            doc["lambdas"] = ls;
            doc["certificate_samples"] = s.tolerances.certificate_samples;
            detail::write_file_atomic(out_path, detail::dump_json(doc));
        }
        return 0;
    }
    if (obs_path.empty()) throw UsageError("invert needs --observation PATH (or --suggest-t0)");
    const std::vector<ObservationRecord> records = read_observations(obs_path);
    if (records.empty()) fail(ErrorKind::IoError, "'" + obs_path + "' contains no observation records");
    Json results = Json::array();
    for (const ObservationRecord& rec : records) {
        const RecoveryResult r = recover_vector_order(rec, s.symbol, s.spectrum(), s.beta0, kind, s.tolerances);
        results.push_back(recovery_json(r));
    }
    Json doc;
    doc["schema"] = "fracorder-recovery/1";
    doc["results"] = results;
    emit(out_path, detail::dump_json(doc));
    return 0;
}

// check

int cmd_check(const Scenario& s, DerivativeKind kind, const std::string& out_path) {
    const PointData p = point_data(s.symbol, s.spectrum(), s.observation_point());
    const ConditionReport report = check_conditions(p.diag, kind);
    std::ostringstream text;
    text << "kind " << to_string(kind) << ", xi0 = (" << p.xi.transpose() << ")"
         << (p.on_node ? " [grid node]" : " [interpolated]") << "\n";
    for (std::size_t l = 0; l < report.modes.size(); ++l) {
        const ModeCondition& c = report.modes[l];
        text << "  lambda_" << l + 1 << " = " << format_double(c.lambda.real()) << " "
             << format_double(c.lambda.imag()) << "i  |arg| - pi/2 = " << format_double(c.spectral_margin)
             << "  spectral " << (c.spectral_ok ? "ok" : "FAIL");
        if (c.sign_ok) text << "  sign " << (*c.sign_ok ? "ok" : "FAIL");
        text << "\n";
    }
    for (const auto& [a, b] : report.degenerate) text << "  degenerate eigenvalues " << a + 1 << ", " << b + 1 << "\n";

    Json certs = Json::array();
    bool certified = false;
    std::optional<double> t0 = s.t0;
    std::string t0_note = s.t0 ? "scenario" : "auto";
    if (report.all_ok()) {
        if (!t0) {
            try {
                t0 = suggest_observation_time(kind, s.beta0, lambdas_at(s), s.tolerances);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoMonotoneTime) throw;
                t0_note = e.what();
            }
        }
        if (t0) {
            certified = true;
            for (Eigen::Index l = 0; l < p.diag.eigenvalues.size(); ++l) {
                const MonotonicityCertificate c = verify_monotonicity(
                    kind, p.diag.eigenvalues(l), *t0, s.beta0, s.tolerances.certificate_samples, s.tolerances);
                certified = certified && c.pass;
                text << "  certificate lambda_" << l + 1 << " at t0 = " << format_double(*t0) << ": "
                     << (c.pass ? "pass" : "FAIL") << " (" << c.samples << " samples"
                     << (c.reason.empty() ? "" : ", " + c.reason) << ")\n";
                certs.push_back(certificate_json(c));
            }
        } else {
            text << "  no certified observation time: " << t0_note << "\n";
        }
    } else {
        text << "  certificates skipped: conditions fail\n";
    }
    const bool ok = report.all_ok() && certified;
    text << (ok ? "all conditions pass\n" : "conditions FAIL\n");
    std::cout << text.str();
    std::cout.flush();
    if (!out_path.empty()) {
        Json doc;
        doc["schema"] = "fracorder-check/1";
        doc["xi0"] = rjson(p.xi);
        doc["xi0_on_node"] = p.on_node;
        doc["beta0"] = s.beta0;
        if (t0) doc["t0"] = *t0;
        doc["t0_source"] = t0_note;
        doc["conditions"] = conditions_json(report);
        doc["certificates"] = certs;
        doc["all_ok"] = ok;
        detail::write_file_atomic(out_path, detail::dump_json(doc));
    }
    return ok ? 0 : 5;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonConvergence:
        case ErrorKind::ContourViolation:
        case ErrorKind::QuadratureFailure:
        case ErrorKind::NonFinite:
            return 3;
        case ErrorKind::SpectralConditionViolation:
        case ErrorKind::DegenerateSignCondition:
        case ErrorKind::DegenerateEigenvalues:
        case ErrorKind::SingularK:
        case ErrorKind::RangeViolation:
        case ErrorKind::InconsistentData:
        case ErrorKind::NoRoot:
        case ErrorKind::NoMonotoneTime:
            return 5;
        case ErrorKind::InvalidArgument:
        case ErrorKind::OutOfDomain:
        case ErrorKind::NonSymmetric:
        case ErrorKind::NotDiagonalizable:
        case ErrorKind::InvalidTime:
        case ErrorKind::ScenarioError:
        case ErrorKind::IoError:
            return 4;
    }
    return 4;
}

Complex parse_complex(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (c != ' ') text.push_back(c);
    auto real = [&](const std::string& s) { return detail::parse_double(s, "complex number '" + raw + "'"); };
    if (text.empty()) fail(ErrorKind::InvalidArgument, "empty complex number");
    if (const auto comma = text.find(','); comma != std::string::npos)
        return {real(text.substr(0, comma)), real(text.substr(comma + 1))};
    if (text.back() != 'i' && text.back() != 'j') return real(text);
    text.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = text.size(); i-- > 1;) {
        if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag = [&](const std::string& s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return real(s);
    };
    if (split == std::string::npos) return {0.0, imag(text)};
    return {real(text.substr(0, split)), imag(text.substr(split))};
}

int run_cli(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Fractional-order toolkit: Mittag-Leffler evaluation, forward solutions and order recovery",
                 "fracorder"};
    app.require_subcommand(1);
    int threads = 1;
    long seed = 0;
    app.add_option("--threads", threads, "Worker threads for grid evaluation")->check(CLI::Range(1, 1024));
    app.add_option("--seed", seed, "Reserved; the library uses no randomness");

    double alpha = 1.0, beta = 1.0;
    std::vector<std::string> zs;
    std::string out_path, scenario_path, kind_flag, obs_path, spatial_path;
    bool suggest = false;

    auto* ml = app.add_subcommand("ml-eval", "Evaluate E_{alpha,beta}(z)");
    ml->add_option("--alpha", alpha, "Index alpha in (0, 1]");
    ml->add_option("--beta", beta, "Parameter beta > 0");
    ml->add_option("--z", zs, "Argument: re, re,im or a+bi (repeatable)")->allow_extra_args(false);
    ml->add_option("--out", out_path, "Output CSV (stdout when absent)");

    auto scenario_opts = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "Scenario JSON")->required();
        sub->add_option("--kind", kind_flag, "Override derivative kind: caputo|rl");
        sub->add_option("--out", out_path, "Output path (stdout when absent)");
    };
    auto* fwd = app.add_subcommand("forward", "Fourier-space solution on the grid at the scenario times");
    scenario_opts(fwd);
    fwd->add_option("--spatial-out", spatial_path, "Also write u(t, x) at the scenario x_points");
    auto* obs = app.add_subcommand("observe", "Write the observation record at (t0, xi0)");
    scenario_opts(obs);
    auto* inv = app.add_subcommand("invert", "Recover the vector order from an observation file");
    scenario_opts(inv);
    inv->add_option("--observation", obs_path, "Observation CSV or JSON");
    inv->add_flag("--suggest-t0", suggest, "Print the certified observation time instead");
    auto* chk = app.add_subcommand("check", "Spectral conditions and monotonicity certificates at xi0");
    scenario_opts(chk);
    auto* ex = app.add_subcommand("example", "Print the ready-made example scenario");
    ex->add_option("--out", out_path, "Output path (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << "run 'fracorder --help' for usage\n";
        return 2;
    }

    try {
        if (ml->parsed()) return cmd_ml_eval(alpha, beta, zs, out_path);
        if (ex->parsed()) {
            emit(out_path, example_scenario_json());
            return 0;
        }
        const Scenario s = load_scenario(scenario_path);
        if (fwd->parsed()) return cmd_forward(s, effective_kind(s, kind_flag), threads, out_path, spatial_path);
        if (obs->parsed()) return cmd_observe(s, effective_kind(s, kind_flag), out_path);
        if (inv->parsed()) return cmd_invert(s, effective_kind(s, kind_flag), obs_path, suggest, out_path);
        if (chk->parsed()) return cmd_check(s, effective_kind(s, kind_flag), out_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

}  // namespace fracorder
