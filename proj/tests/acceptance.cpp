#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "fracorder/gamma.hpp"
#include "fracorder/inverse.hpp"
#include "fracorder/scenario.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fracorder;

namespace {

RVector vec(std::initializer_list<double> v) {
    RVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

CVector cvec(std::initializer_list<Complex> v) {
    CVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (Complex x : v) r(i++) = x;
    return r;
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

const char* kind_name(DerivativeKind k) { return k == DerivativeKind::Caputo ? "caputo" : "rl"; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

const FrequencyBox kBox{{-4.0}, {4.0}, {161}};

CMatrix example_matrix(double xi) {
    CMatrix a(2, 2);
    a << -xi * xi, -xi, -xi, -xi * xi;
    return a;
}

Outcome special_functions() {
    Outcome o;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_exp = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Complex z = std::polar(20.0 * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
        const Complex ref = std::exp(z);
        worst_exp = std::max(worst_exp, std::abs(ml_one(1.0, z) - ref) / std::abs(ref));
    }
    bool origin_exact = true;
    for (int i = 0; i <= 100; ++i) {
        const double beta = i == 0 ? 1e-3 : 0.01 * i;
        origin_exact = origin_exact && ml_one(beta, 0.0) == Complex(1.0);
    }
    double worst_erfc = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = 0.01 * i;
        worst_erfc = std::max(worst_erfc, std::abs(ml_one(0.5, -x).real() - oracle::erfcx(x)));
    }
    double worst_rec = 0.0;
    for (double alpha : {0.3, 0.5, 0.75, 1.0})
        for (double beta : {0.5, 1.0, 1.5})
            for (int i = 0; i < 16; ++i) {
                const Complex z = std::polar(0.25 + 4.75 * u(rng), kPi * (2.0 * u(rng) - 1.0));
                const Complex next = z * ml_two(alpha, alpha + beta, z);
                const Complex res = ml_two(alpha, beta, z) - next - rgamma(beta);
                worst_rec = std::max(worst_rec, std::abs(res) / (1.0 + std::abs(next)));
            }
    o.pass = worst_exp <= 1e-11 && origin_exact && worst_erfc <= 1e-9 && worst_rec <= 1e-9;
    o.detail = "exp rel " + fmt(worst_exp) + ", E(0)=1 " + (origin_exact ? "exact" : "NOT exact") +
               ", erfc " + fmt(worst_erfc) + ", recurrence " + fmt(worst_rec);
    return o;
}

Outcome regime_consistency() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MLRegimePolicy policy;
    const double alphas[] = {0.4, 0.6, 0.9};
    double worst = 0.0;
    int points = 0;
    for (int i = 0; i < 100; ++i) {
        const double alpha = alphas[i % 3];
        const double beta = (i / 3) % 2 == 0 ? 1.0 : alpha;
        const double r = 2.5 + 5.0 * u(rng);
        const double phi = 3.0 * kPi / 5.0 + (2.0 * kPi / 5.0) * u(rng);
        const Complex z = std::polar(r, u(rng) < 0.5 ? phi : -phi);
        const Complex c = ml_contour(alpha, beta, z, contour_for(alpha, z, policy)).value;
        const Complex s = ml_series(alpha, beta, z, 1e-15).value;
        worst = std::max(worst, std::abs(c - s) / std::abs(s));
        ++points;
    }
    return {worst <= 1e-9, std::to_string(points) + " points, worst rel " + fmt(worst)};
}

Outcome forward_oracle() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MatrixSymbol s = MatrixSymbol::builtin_example();
    const VectorOrder unit{vec({1.0, 1.0}), 0.1};
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const RVector center = vec({-2.0 + 4.0 * u(rng)});
        const double width = 0.3 + 0.7 * u(rng);
        const CVector amp = cvec({std::polar(0.5 + u(rng), 2.0 * kPi * u(rng)), std::polar(0.5 + u(rng), 2.0 * kPi * u(rng))});
        const BandLimitedData data = BandLimitedData::gaussian(kBox, center, width, amp);
        for (double t : {0.5, 1.0, 5.0})
            for (DerivativeKind kind : {DerivativeKind::Caputo, DerivativeKind::RiemannLiouville}) {
                const CMatrix field = fourier_field(s, data, unit, t, kind, 2);
                for (std::size_t i = 0; i < kBox.node_count(); ++i) {
                    const CVector ref = oracle::expm(example_matrix(kBox.node(i)(0)) * t) * data.at_node(i);
                    const CVector got = field.row(static_cast<Eigen::Index>(i)).transpose();
                    const double scale = ref.norm();
                    if (scale == 0.0) continue;
                    worst = std::max(worst, (got - ref).norm() / scale);
                }
            }
    }
    return {worst <= 1e-8, "3 spectra x 3 times x 2 kinds x 161 nodes, worst normwise rel " + fmt(worst)};
}

Outcome certificates() {
    const Complex lambdas[] = {-1.0, -2.0, -5.0, Complex(-1.0, 0.5), Complex(-0.5, 2.0)};
    int cases = 0, failures = 0;
    std::string first;
    for (Complex lambda : lambdas)
        for (DerivativeKind kind : {DerivativeKind::Caputo, DerivativeKind::RiemannLiouville})
            for (double beta0 : {0.1, 0.3, 0.5}) {
                ++cases;
                bool ok = false;
                try {
                    const double t0 = suggest_observation_time(kind, beta0, {lambda});
                    const MonotonicityCertificate c = verify_monotonicity(kind, lambda, t0, beta0, 1000);
                    // endpoint ordering R(1) <= R(beta) <= R(beta0) on the sampled grid, in log form
                    const double l1 = c.r_one.log_abs, l0 = c.r_floor.log_abs;
                    bool order_ok = c.r_one.sign == 1 && c.r_floor.sign == 1 && l1 <= l0;
                    for (int i = 1; i < 1000 && order_ok; i += 37) {
                        const double beta = beta0 + (1.0 - beta0) * i / 999.0;
                        const SignedLog r = monotone_map_log(kind, beta, lambda, t0);
                        order_ok = r.sign == 1 && l1 <= r.log_abs && r.log_abs <= l0;
                    }
                    ok = c.pass && c.samples == 1000 && order_ok;
                } catch (const Error& e) {
                    if (first.empty()) first = e.what();
                }
                if (!ok) {
                    ++failures;
                    if (first.empty()) {
                        std::ostringstream m;
                        m << "lambda=" << lambda << " " << kind_name(kind) << " beta0=" << beta0;
                        first = m.str();
                    }
                }
            }
    return {failures == 0, std::to_string(cases) + " cases, " + std::to_string(failures) + " violations" +
                               (first.empty() ? "" : " (first: " + first + ")")};
}

Outcome round_trip() {
    const MatrixSymbol s = MatrixSymbol::builtin_example();
    const BandLimitedData data = BandLimitedData::gaussian(kBox, vec({2.0}), 0.5, cvec({1.0, 2.0}));
    const double grid[] = {0.15, 0.4, 0.7, 0.95, 1.0};
    const double beta0 = 0.1;
    double worst_beta = 0.0, worst_res = 0.0;
    int cases = 0, failures = 0;
    std::string first;
    for (DerivativeKind kind : {DerivativeKind::Caputo, DerivativeKind::RiemannLiouville}) {
        const double t0 = suggest_observation_time(kind, beta0, {-2.0, -6.0});
        for (double b1 : grid)
            for (double b2 : grid) {
                ++cases;
                try {
                    const VectorOrder order{vec({b1, b2}), beta0};
                    const RecoveryResult r = recover_vector_order(observe(s, data, order, t0, vec({2.0}), kind), s,
                                                                  data, beta0, kind);
                    const double err = (r.order.beta - order.beta).cwiseAbs().maxCoeff();
                    double res = 0.0;
                    for (const OrderRecovery& m : r.modes) res = std::max(res, m.complex_residual);
                    worst_beta = std::max(worst_beta, err);
                    worst_res = std::max(worst_res, res);
                    if (err > 1e-6 || res > 1e-7) ++failures;
                } catch (const Error& e) {
                    ++failures;
                    if (first.empty()) first = e.what();
                }
            }
    }
    return {failures == 0, std::to_string(cases) + " cases, worst |beta*-beta| " + fmt(worst_beta) +
                               ", worst complex residual " + fmt(worst_res) +
                               (first.empty() ? "" : " (first error: " + first + ")")};
}

Outcome uniqueness() {
    const MatrixSymbol s = MatrixSymbol::builtin_example();
    // phi_1 = 1, phi_2 = 2 on the whole box so that both observation points carry a well-posed K.
    CMatrix values(static_cast<Eigen::Index>(kBox.node_count()), 2);
    values.col(0).setConstant(1.0);
    values.col(1).setConstant(2.0);
    const BandLimitedData data(kBox, values);
    const double beta0 = 0.1;
    const double t0 = std::max(suggest_observation_time(DerivativeKind::Caputo, beta0, {-2.0, -6.0}),
                               suggest_observation_time(DerivativeKind::Caputo, beta0, {-6.0, -12.0}));
    const double t1 = t0 + 3.0;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(beta0, 1.0);
    double worst = 0.0;
    std::string first;
    for (int i = 0; i < 5; ++i) {
        const VectorOrder order{vec({u(rng), u(rng)}), beta0};
        try {
            const RecoveryResult a = recover_vector_order(observe(s, data, order, t0, vec({2.0}), DerivativeKind::Caputo),
                                                          s, data, beta0, DerivativeKind::Caputo);
            const RecoveryResult b = recover_vector_order(observe(s, data, order, t1, vec({3.0}), DerivativeKind::Caputo),
                                                          s, data, beta0, DerivativeKind::Caputo);
            worst = std::max(worst, (a.order.beta - b.order.beta).cwiseAbs().maxCoeff());
        } catch (const Error& e) {
            if (first.empty()) first = e.what();
            worst = std::numeric_limits<double>::infinity();
        }
    }
    return {worst <= 2e-6, "5 orders, t0=" + fmt(t0) + " t1=" + fmt(t1) + ", worst disagreement " + fmt(worst) +
                               (first.empty() ? "" : " (error: " + first + ")")};
}

Outcome preconditions() {
    const MatrixSymbol s = MatrixSymbol::builtin_example();
    std::vector<std::string> lines;
    bool all = true;
    auto expect = [&](const char* name, ErrorKind want, const std::function<void()>& f) {
        std::string got = "no error";
        try {
            f();
        } catch (const Error& e) {
            got = to_string(e.kind());
        } catch (const std::exception& e) {
            got = std::string("foreign exception: ") + e.what();
        }
        const bool ok = got == to_string(want);
        all = all && ok;
        lines.push_back(std::string(name) + (ok ? " ok" : " got " + got));
    };
    const VectorOrder order{vec({0.5, 0.7}), 0.1};

    expect("SingularK", ErrorKind::SingularK, [&] {
        const BandLimitedData equal = BandLimitedData::gaussian(kBox, vec({2.0}), 0.5, cvec({1.0, 1.0}));
        const ObservationRecord r = observe(s, equal, order, 2.0, vec({2.0}), DerivativeKind::Caputo);
        recover_vector_order(r, s, equal, 0.1, DerivativeKind::Caputo);
    });
    expect("SpectralConditionViolation", ErrorKind::SpectralConditionViolation, [&] {
        const BandLimitedData data = BandLimitedData::gaussian(kBox, vec({0.5}), 0.5, cvec({1.0, 2.0}));
        const ObservationRecord r = observe(s, data, order, 2.0, vec({0.5}), DerivativeKind::Caputo);
        recover_vector_order(r, s, data, 0.1, DerivativeKind::Caputo);
    });
    expect("DegenerateSignCondition", ErrorKind::DegenerateSignCondition, [&] {
        const MatrixSymbol scalar =
            MatrixSymbol::polynomial(PolynomialMatrix{1, 1, {Polynomial{Monomial{{0}, Complex(-1.0, 1.0)}}}});
        const FrequencyBox box{{0.0}, {1.0}, {2}};
        const BandLimitedData data(box, CMatrix::Ones(2, 1));
        const VectorOrder o{vec({0.6}), 0.1};
        const ObservationRecord r = observe(scalar, data, o, 2.0, vec({0.0}), DerivativeKind::RiemannLiouville);
        recover_vector_order(r, scalar, data, 0.1, DerivativeKind::RiemannLiouville);
    });
    expect("RangeViolation", ErrorKind::RangeViolation, [&] {
        const BandLimitedData data = BandLimitedData::gaussian(kBox, vec({2.0}), 0.5, cvec({1.0, 2.0}));
        ObservationRecord r = observe(s, data, order, 2.0, vec({2.0}), DerivativeKind::Caputo);
        const Diagonalization d = diagonalize(s, vec({2.0}));
        const CMatrix k = k_coeff(d, data.at(vec({2.0})));
        r.d = k * cvec({2.0 * r_c(0.1, -2.0, 2.0), e1_caputo(0.7, -6.0, 2.0)});
        recover_vector_order(r, s, data, 0.1, DerivativeKind::Caputo);
    });
    std::string detail;
    for (const std::string& l : lines) detail += (detail.empty() ? "" : ", ") + l;
    return {all, detail};
}


int run_cli_process(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string("'") + FRACORDER_CLI_PATH + "' " + args + " > '" +
                            (dir / "stdout.txt").string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism() {
    const fs::path root = fs::temp_directory_path() / ("fracorder_acceptance_" + std::to_string(::getpid()));
    std::string outputs[2][3];
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path dir = root / std::to_string(pass);
        fs::create_directories(dir);
        const std::string scen = (dir / "scenario.json").string();
        const std::string obs = (dir / "obs.csv").string();
        const std::string rec = (dir / "recovery.json").string();
        if (run_cli_process("example --out '" + scen + "'", dir) != 0 ||
            run_cli_process("observe --scenario '" + scen + "' --out '" + obs + "'", dir) != 0 ||
            run_cli_process("invert --scenario '" + scen + "' --observation '" + obs + "' --out '" + rec + "'", dir) != 0)
            return {false, "pipeline command failed in pass " + std::to_string(pass) + ": " + slurp(dir / "stderr.txt")};
        outputs[pass][0] = slurp(scen);
        outputs[pass][1] = slurp(obs);
        outputs[pass][2] = slurp(rec);
    }
    fs::remove_all(root);
    const bool same = outputs[0][0] == outputs[1][0] && outputs[0][1] == outputs[1][1] &&
                      outputs[0][2] == outputs[1][2] && !outputs[0][2].empty();
    return {same, same ? "example, observe, invert outputs byte-identical across two runs"
                       : "outputs differ between runs"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "special-function identities", special_functions},
        {2, "regime consistency", regime_consistency},
        {3, "forward reduction oracle", forward_oracle},
        {4, "monotonicity certificates", certificates},
        {5, "round-trip order recovery", round_trip},
        {6, "uniqueness across observations", uniqueness},
        {7, "precondition errors", preconditions},
        {8, "CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("unexpected exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
