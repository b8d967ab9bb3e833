#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fracorder/cli.hpp"
#include "fracorder/scenario.hpp"

namespace fs = std::filesystem;
using namespace fracorder;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("fracorder_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const std::string cmd = std::string("'") + FRACORDER_CLI_PATH + "' " + args + " > '" + out.string() +
                            "' 2> '" + (work_dir() / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

void write(const std::string& name, const std::string& text) {
    std::ofstream(work_dir() / name) << text;
}

RVector vec1(double x) { return RVector::Constant(1, x); }

}  // namespace

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(ErrorKind::NonConvergence) == 3);
    CHECK(exit_code_for(ErrorKind::OutOfDomain) == 4);
    CHECK(exit_code_for(ErrorKind::ScenarioError) == 4);
    CHECK(exit_code_for(ErrorKind::SingularK) == 5);
    CHECK(exit_code_for(ErrorKind::NoMonotoneTime) == 5);
}

TEST_CASE("complex argument parsing") {
    CHECK(parse_complex("-1") == Complex(-1.0, 0.0));
    CHECK(parse_complex("1.5,-2") == Complex(1.5, -2.0));
    CHECK(parse_complex("3-4i") == Complex(3.0, -4.0));
    CHECK(parse_complex("-2i") == Complex(0.0, -2.0));
    CHECK(parse_complex("1e-3+i") == Complex(1e-3, 1.0));
    CHECK_THROWS_AS(parse_complex("abc"), Error);
}

TEST_CASE("ml-eval values and exit codes") {
    Run r = run("ml-eval --alpha 1 --beta 1 --z -1 --z 0");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("alpha,beta,re_z,im_z,re_value,im_value,regime,error_estimate\n", 0) == 0);
    CHECK(r.out.find("3.6787944117144" ) != std::string::npos);
    CHECK(r.out.find("1.0000000000000000e+00,0.0000000000000000e+00,exact") != std::string::npos);

    r = run("ml-eval --alpha 0.5 --z -1");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("4.27583576155") != std::string::npos);

    CHECK(run("ml-eval --alpha 0.5 --z notanumber").code == 2);
    CHECK(run("ml-eval --alpha -1 --z 1").code != 0);
    CHECK(run("no-such-command").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("forward with an empty time list writes only the header") {
    std::string s = example_scenario_json();
    const auto a = s.find("\"times\": [");
    const auto b = s.find(']', a);
    s.replace(a, b - a + 1, "\"times\": []");
    write("empty.json", s);
    const Run r = run("forward --scenario " + path("empty.json") + " --out " + path("empty.csv"));
    REQUIRE(r.code == 0);
    CHECK(slurp(path("empty.csv")) == "t,xi_1,re_u1,im_u1,re_u2,im_u2\n");
}

TEST_CASE("forward at t = 0 reproduces the spectrum") {
    REQUIRE(run("example --out " + path("ex.json")).code == 0);
    REQUIRE(run("forward --scenario " + path("ex.json") + " --out " + path("fwd.csv")).code == 0);
    std::istringstream in(slurp(path("fwd.csv")));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        double t, xi, r1, i1, r2, i2;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &xi, &r1, &i1, &r2, &i2) == 6);
        if (t != 0.0) continue;
        ++rows;
        const double g = std::exp(-(xi - 2.0) * (xi - 2.0) / (2.0 * 0.25));
        CHECK(std::abs(r1 - g) <= 1e-15);
        CHECK(std::abs(r2 - 2.0 * g) <= 1e-15);
    }
    CHECK(rows == 161);
}

TEST_CASE("observe, invert and check on the example") {
    REQUIRE(run("example --out " + path("ex.json")).code == 0);
    REQUIRE(run("observe --scenario " + path("ex.json") + " --out " + path("obs.csv")).code == 0);
    const Run inv = run("invert --scenario " + path("ex.json") + " --observation " + path("obs.csv"));
    REQUIRE(inv.code == 0);
    CHECK(inv.out.find("fracorder-recovery/1") != std::string::npos);
    const auto at = inv.out.find("\"order\": [");
    REQUIRE(at != std::string::npos);
    double b1 = 0.0, b2 = 0.0;
    REQUIRE(std::sscanf(inv.out.c_str() + at, "\"order\": [%lf, %lf]", &b1, &b2) == 2);
    CHECK(std::abs(b1 - 0.4) <= 1e-6);
    CHECK(std::abs(b2 - 0.85) <= 1e-6);

    const Run t0 = run("invert --scenario " + path("ex.json") + " --suggest-t0");
    CHECK(t0.code == 0);
    CHECK(t0.out.rfind("t0 = ", 0) == 0);

    const Run chk = run("check --scenario " + path("ex.json"));
    CHECK(chk.code == 0);
    CHECK(chk.out.find("1000") != std::string::npos);

    std::string s = example_scenario_json();
    const auto a = s.find("\"xi0\": [");
    const auto b = s.find(']', a);
    s.replace(a, b - a + 1, "\"xi0\": [0.5]");
    write("ex_half_auto.json", s);
    // the automatic t0 needs certificates, which the positive eigenvalue rules out
    CHECK(run("observe --scenario " + path("ex_half_auto.json")).code == 5);
    s.replace(s.find("\"t0\": \"auto\""), 12, "\"t0\": 2");
    write("ex_half.json", s);
    CHECK(run("check --scenario " + path("ex_half.json")).code == 5);
    REQUIRE(run("observe --scenario " + path("ex_half.json") + " --out " + path("obs_half.json")).code == 0);
    CHECK(run("invert --scenario " + path("ex_half.json") + " --observation " + path("obs_half.json")).code == 5);

    s.replace(s.find("\"xi0\": [0.5]"), 12, "\"xi0\": [9.5]");
    REQUIRE(s.find("\"xi0\": [9.5]") != std::string::npos);
    write("ex_out.json", s);
    CHECK(run("observe --scenario " + path("ex_out.json")).code == 4);
}

TEST_CASE("SingularK is reported as an inverse precondition failure") {
    std::string s = example_scenario_json();
    const auto a = s.find("\"amplitudes\": [");
    const auto b = s.find(']', a);
    s.replace(a, b - a + 1, "\"amplitudes\": [1, 1]");
    write("singular.json", s);
    REQUIRE(run("observe --scenario " + path("singular.json") + " --out " + path("singular_obs.json")).code == 0);
    const Run r = run("invert --scenario " + path("singular.json") + " --observation " + path("singular_obs.json"));
    CHECK(r.code == 5);
    const std::string err = slurp(work_dir() / "stderr.txt");
    CHECK(err.find("SingularK") != std::string::npos);
    CHECK(err.find("xi0") != std::string::npos);
}

TEST_CASE("scenario errors") {
    write("bad.json", "{\"schema\": \"fracorder-scenario/1\", \"mystery\": 1}");
    CHECK(run("forward --scenario " + path("bad.json")).code == 4);
    write("broken.json", "{not json");
    CHECK(run("forward --scenario " + path("broken.json")).code == 4);
    CHECK(run("forward --scenario " + path("missing.json")).code == 4);
    CHECK(run("forward").code == 2);
}

TEST_CASE("pipeline is byte-identical across runs") {
    std::string first[3];
    for (int pass = 0; pass < 2; ++pass) {
        const std::string tag = std::to_string(pass);
        REQUIRE(run("example --out " + path("det" + tag + ".json")).code == 0);
        REQUIRE(run("observe --scenario " + path("det" + tag + ".json") + " --out " + path("det" + tag + ".csv")).code == 0);
        REQUIRE(run("--threads 3 invert --scenario " + path("det" + tag + ".json") + " --observation " +
                    path("det" + tag + ".csv") + " --out " + path("rec" + tag + ".json")).code == 0);
        const std::string got[3] = {slurp(path("det" + tag + ".json")), slurp(path("det" + tag + ".csv")),
                                    slurp(path("rec" + tag + ".json"))};
        for (int i = 0; i < 3; ++i) {
            if (pass == 0) first[i] = got[i];
            else CHECK(got[i] == first[i]);
        }
    }
    CHECK_FALSE(first[2].empty());
}

TEST_CASE("scenario parsing") {
    const Scenario ex = parse_scenario(example_scenario_json());
    CHECK(ex.symbol.kind() == SymbolKind::Builtin);
    CHECK(ex.box.node_count() == 161);
    CHECK_FALSE(ex.t0.has_value());
    CHECK(ex.vector_order().beta(1) == 0.85);
    CHECK(ex.times.size() == 4);

    const std::string poly = R"({
      "schema": "fracorder-scenario/1",
      "frequency_box": {"lower": [-2], "upper": [2], "points": [41]},
      "symbol": {"kind": "polynomial", "m": 2,
                 "entries": [[[[[2], -1]], [[[1], -1]]], [[[[1], -1]], [[[2], -1]]]]},
      "initial_data": {"preset": "raised-cosine", "center": [1], "radius": 0.5, "amplitudes": [1, [0, 2]]},
      "kind": "rl", "order": [0.5, 0.6], "t0": 90, "xi0": [1.5],
      "tolerances": {"beta_tol": 1e-10, "contour_nodes": 256}
    })";
    const Scenario p = parse_scenario(poly);
    CHECK(p.symbol.kind() == SymbolKind::Polynomial);
    CHECK(p.kind == DerivativeKind::RiemannLiouville);
    CHECK(*p.t0 == 90.0);
    CHECK(p.tolerances.beta_tol == 1e-10);
    CHECK(p.tolerances.ml.contour_nodes == 256);
    CHECK(p.spectrum().at(vec1(1.0))(1) == Complex(0.0, 2.0));
    const CMatrix a = evaluate_symbol(p.symbol, vec1(2.0));
    CHECK(a(0, 1) == Complex(-2.0));

    auto kind_of = [](const std::string& text) {
        try {
            parse_scenario(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::IoError;
    };
    std::string nested = poly;
    nested.replace(nested.find("\"beta_tol\""), 10, "\"beta_tolx\"");
    CHECK(kind_of(nested) == ErrorKind::ScenarioError);
    std::string schema = poly;
    schema.replace(schema.find("scenario/1"), 10, "scenario/9");
    CHECK(kind_of(schema) == ErrorKind::ScenarioError);
    CHECK(kind_of("[1, 2]") == ErrorKind::ScenarioError);
}
