// End-to-end checks of the cevsim binary: exit codes, output formats,
// reproducibility of CSV artifacts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "cli_capture.tmp";
    const std::string cmd =
        std::string(CEVSIM_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream f(out_file);
    std::stringstream buf;
    buf << f.rdbuf();
    std::remove(out_file.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return RunResult{code, buf.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("estimate: summary, CSV artifact and manifest sidecar") {
    const auto r = run_cli(
        "estimate --mu 0 --sigma 1 --p 0.5 --x0 1 --t 5 --delta 1e-2 --beta 0.9 "
        "--m 2000 --seed 42 --out est.csv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("p_hat = ") != std::string::npos);
    CHECK(r.output.find("err_rel") != std::string::npos);

    const std::string csv = slurp("est.csv");
    CHECK(csv.find("delta,threshold,p_hat,stderr,ci_lo,ci_hi,err_pct,"
                    "ci_err_lo_pct,ci_err_hi_pct\n") == 0);
    CHECK(csv.find("\r") == std::string::npos);  // LF only

    const std::string manifest = slurp("est.csv.manifest.json");
    CHECK(manifest.find("\"command\": \"estimate\"") != std::string::npos);
    CHECK(manifest.find("\"seed_derivation\"") != std::string::npos);
    CHECK(manifest.find("0x9E3779B97F4A7C15") != std::string::npos);
    std::remove("est.csv");
    std::remove("est.csv.manifest.json");
}

TEST_CASE("usage errors exit with code 2 and name the admissible range") {
    const auto beta_gate = run_cli("estimate --beta 1 --p 0.5 --m 10");
    CHECK(beta_gate.exit_code == 2);
    CHECK(beta_gate.output.find("(0, 1)") != std::string::npos);

    CHECK(run_cli("estimate --sigma 0 --m 10").exit_code == 2);
    CHECK(run_cli("estimate --p 1.0 --m 10").exit_code == 2);
    CHECK(run_cli("fig1 --p 0.75 --m 10").exit_code == 2);
    CHECK(run_cli("estimate --no-such-flag").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("analytic prints reference values") {
    const auto cdf = run_cli("analytic --mu 0 --sigma 1 --x 1 --t 5");
    CHECK(cdf.exit_code == 0);
    CHECK(cdf.output.find("0.670320046036") != std::string::npos);

    const auto psi = run_cli("analytic --mu 0 --sigma 1 --p 0.5 --x 0.5 --psi");
    CHECK(psi.exit_code == 0);
    CHECK(psi.output.find("0.693147180") != std::string::npos);

    const auto phi0 = run_cli("analytic --mu 0 --sigma 1 --p 0.5 --x 0 --phi");
    CHECK(phi0.exit_code == 0);
    CHECK(phi0.output.substr(0, 1) == "0");
}

TEST_CASE("identical invocations produce byte-identical CSV across workers") {
    const std::string base =
        "estimate --mu 0 --sigma 1 --p 0.5 --x0 1 --t 5 --delta 1e-2 --beta 0.9 "
        "--m 4000 --seed 9 ";
    CHECK(run_cli(base + "--workers 1 --out w1.csv").exit_code == 0);
    CHECK(run_cli(base + "--workers 4 --out w4.csv").exit_code == 0);
    const std::string w1 = slurp("w1.csv");
    CHECK(!w1.empty());
    CHECK(w1 == slurp("w4.csv"));
    std::remove("w1.csv");
    std::remove("w4.csv");
    std::remove("w1.csv.manifest.json");
    std::remove("w4.csv.manifest.json");
}

TEST_CASE("sweep emits a CSV table and a self-contained SVG") {
    const auto r = run_cli(
        "sweep --mu 0 --sigma 1 --p 0.5 --x0 1 --t 5 --beta 0.9 --m 1000 --seed 3 "
        "--deltas 1e-1,1e-2 --out sweep.csv --svg sweep.svg");
    CHECK(r.exit_code == 0);
    const std::string csv = slurp("sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    const std::string svg = slurp("sweep.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<desc>") != std::string::npos);          // embedded manifest
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // zero line
    CHECK(svg.find("http://www.w3.org/2000/svg") != std::string::npos);
    std::remove("sweep.csv");
    std::remove("sweep.csv.manifest.json");
    std::remove("sweep.svg");

    // single-point sweep degenerates gracefully
    const auto single = run_cli(
        "sweep --p 0.5 --m 500 --deltas 1e-2 --seed 3 --svg single.svg --out single.csv");
    CHECK(single.exit_code == 0);
    CHECK(slurp("single.svg").find("<circle") != std::string::npos);
    std::remove("single.csv");
    std::remove("single.csv.manifest.json");
    std::remove("single.svg");
}

TEST_CASE("config file fills unset flags and is echoed to the manifest") {
    {
        std::ofstream cfg("cfg.json");
        cfg << R"({"mu": 0.0, "sigma": 1.0, "p": 0.5, "delta": 1e-2, "m": 1500, "seed": 77})";
    }
    const auto r = run_cli("estimate --config cfg.json --m 500 --out cfgrun.csv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("m = 500") != std::string::npos);  // explicit flag wins
    const std::string manifest = slurp("cfgrun.csv.manifest.json");
    CHECK(manifest.find("config_file") != std::string::npos);
    CHECK(manifest.find("\"seed\": 77") != std::string::npos);
    std::remove("cfg.json");
    std::remove("cfgrun.csv");
    std::remove("cfgrun.csv.manifest.json");
}

TEST_CASE("exit-time command reports the psi reference") {
    const auto r = run_cli(
        "exit-time --mu 0 --sigma 1 --p 0.5 --x0 0.5 --delta 1e-3 --beta 0.9 --t 50 "
        "--m 2000 --seed 5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("mean_exit_time = ") != std::string::npos);
    CHECK(r.output.find("psi(x0) = 0.693147180") != std::string::npos);
    CHECK(r.output.find("censored_fraction = ") != std::string::npos);
}

TEST_CASE("threshold-zero experimental mode runs") {
    const auto r = run_cli(
        "estimate --mu 0 --sigma 1 --p 0.5 --x0 1 --t 5 --delta 1e-2 --m 1000 --seed 2 "
        "--threshold-zero");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("threshold = 0") != std::string::npos);
}

TEST_CASE("selftest passes clean and fails under the mutation control") {
    const auto clean = run_cli("selftest");
    CHECK(clean.exit_code == 0);
    CHECK(clean.output.find("[FAIL]") == std::string::npos);
    CHECK(clean.output.find("mc.determinism") != std::string::npos);

    const std::string out_file = "cli_capture.tmp";
    const std::string cmd = std::string("CEVSIM_SELFTEST_MUTATE=1 ") + CEVSIM_CLI_PATH +
                            " selftest > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream f(out_file);
    std::stringstream buf;
    buf << f.rdbuf();
    std::remove(out_file.c_str());
    CHECK(code == 1);
    CHECK(buf.str().find("[FAIL] mc.determinism") != std::string::npos);
}
