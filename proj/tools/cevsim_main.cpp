// cevsim: Monte Carlo estimation of CEV absorption times with the clipped
// Euler-Maruyama scheme and the mollified stopping rule, validated against
// the closed-form absorption law and the exit-problem quadratures.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cevsim/analytic.hpp"
#include "cevsim/format.hpp"
#include "cevsim/kernels.hpp"
#include "cevsim/manifest.hpp"
#include "cevsim/monte_carlo.hpp"
#include "cevsim/selftest.hpp"
#include "cevsim/svg.hpp"

namespace {

using cevsim::CevParams;
using cevsim::ConfigError;
using cevsim::format_sig;
using cevsim::McConfig;
using cevsim::SchemeConfig;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
    double mu = 0.0;
    double sigma = 1.0;
    double p = 0.5;
    double x0 = 1.0;
    double t = 5.0;
    double delta = 1e-3;
    double beta = -1.0;  // <0: use default_beta(p)
    std::vector<double> deltas;
    std::uint64_t m = 100000;
    std::uint64_t seed = 42;
    unsigned workers = 0;
    std::string out;
    std::string svg;
    std::string config;
    bool threshold_zero = false;
    double x = 1.0;
    bool only_phi = false;
    bool only_psi = false;

    nlohmann::json config_echo;
};

void add_model_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--mu", o.mu, "drift rate");
    cmd->add_option("--sigma", o.sigma, "volatility scale (> 0)");
    cmd->add_option("--p", o.p, "diffusion exponent in [0.5, 1)");
    cmd->add_option("--x0", o.x0, "initial value (> 0)");
}

void add_run_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--t", o.t, "time horizon");
    cmd->add_option("--delta", o.delta, "grid step");
    cmd->add_option("--beta", o.beta, "mollification exponent; default 0.9*(1/2)/(1-p)");
    cmd->add_option("--m", o.m, "number of trajectories");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--workers", o.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", o.out, "CSV output path");
    cmd->add_option("--config", o.config, "JSON config file with flag-named keys");
}

// Values from --config fill every option the command line left untouched.
void apply_config_file(CLI::App* cmd, Options& o) {
    if (o.config.empty()) return;
    std::ifstream f(o.config);
    if (!f) throw ConfigError("cannot open config file: " + o.config);
    nlohmann::json j;
    f >> j;
    o.config_echo = j;

    auto take = [&](const char* key, auto& slot) {
        const auto* opt = cmd->get_option_no_throw(std::string("--") + key);
        if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
        if (j.contains(key)) slot = j.at(key).template get<std::decay_t<decltype(slot)>>();
    };
    take("mu", o.mu);
    take("sigma", o.sigma);
    take("p", o.p);
    take("x0", o.x0);
    take("t", o.t);
    take("delta", o.delta);
    take("beta", o.beta);
    take("deltas", o.deltas);
    take("m", o.m);
    take("seed", o.seed);
    take("workers", o.workers);
    take("out", o.out);
    take("svg", o.svg);
    take("x", o.x);
    take("threshold-zero", o.threshold_zero);
}

double effective_beta(const Options& o) {
    return o.beta < 0.0 ? cevsim::default_beta(o.p) : o.beta;
}

CevParams model_of(const Options& o) {
    CevParams params{o.mu, o.sigma, o.p, o.x0};
    params.validate();
    return params;
}

nlohmann::json inputs_json(const Options& o, double beta, nlohmann::json extra) {
    nlohmann::json j{{"mu", o.mu},   {"sigma", o.sigma},     {"p", o.p},
                     {"x0", o.x0},   {"t", o.t},             {"beta", beta},
                     {"m", o.m},     {"seed", o.seed},       {"workers", o.workers},
                     {"threshold_zero", o.threshold_zero}};
    j.update(extra);
    if (!o.config_echo.is_null()) j["config_file"] = o.config_echo;
    return j;
}

cevsim::RunManifest make_manifest(const std::string& command, nlohmann::json inputs) {
    return cevsim::RunManifest{command, std::move(inputs),
                               cevsim::kernel_name(cevsim::select_kernel())};
}

const std::vector<std::string> kEstimateHeader = {
    "delta",  "threshold", "p_hat",   "stderr",         "ci_lo",
    "ci_hi",  "err_pct",   "ci_err_lo_pct", "ci_err_hi_pct"};

std::vector<std::string> estimate_row(double delta, double threshold,
                                      const cevsim::McEstimate& est,
                                      std::optional<double> exact) {
    std::vector<std::string> row{format_sig(delta),   format_sig(threshold),
                                 format_sig(est.p_hat), format_sig(est.stderr_value),
                                 format_sig(est.ci_lo), format_sig(est.ci_hi)};
    if (exact && est.err_rel_pct) {
        row.push_back(format_sig(*est.err_rel_pct));
        row.push_back(format_sig(cevsim::relative_error(est.ci_lo, *exact)));
        row.push_back(format_sig(cevsim::relative_error(est.ci_hi, *exact)));
    } else {
        row.insert(row.end(), {"", "", ""});
    }
    return row;
}

std::optional<double> exact_probability(const CevParams& params, double t) {
    if (params.p != 0.5) return std::nullopt;
    return cevsim::absorption_cdf_half(params.mu, params.sigma, params.x0, t);
}

int cmd_estimate(Options& o) {
    const CevParams params = model_of(o);
    const double beta = effective_beta(o);
    cevsim::validate_beta(o.p, beta);
    SchemeConfig scheme = cevsim::make_scheme(o.delta, beta, o.t);
    if (o.threshold_zero) scheme.threshold = 0.0;

    const std::optional<double> exact = exact_probability(params, o.t);
    const McConfig mc{o.m, o.seed, o.workers};
    const cevsim::McEstimate est = cevsim::estimate_absorption(params, scheme, o.t, mc, exact);

    std::cout << "p_hat = " << format_sig(est.p_hat) << "  stderr = "
              << format_sig(est.stderr_value) << "  ci99 = [" << format_sig(est.ci_lo) << ", "
              << format_sig(est.ci_hi) << "]\n";
    std::cout << "m = " << est.m << "  delta = " << format_sig(scheme.delta)
              << "  threshold = " << format_sig(scheme.threshold) << "  beta = "
              << format_sig(beta) << "  seed = " << o.seed << '\n';
    if (exact) {
        std::cout << "exact = " << format_sig(*exact) << "  err_rel = "
                  << format_sig(*est.err_rel_pct) << "%\n";
    }

    cevsim::CsvTable csv(kEstimateHeader);
    csv.add_row(estimate_row(scheme.delta, scheme.threshold, est, exact));
    if (!o.out.empty()) {
        csv.write_file(o.out);
        const auto manifest = make_manifest(
            "estimate", inputs_json(o, beta,
                                    {{"delta", o.delta},
                                     {"threshold", scheme.threshold},
                                     {"out", o.out}}));
        std::cout << "wrote " << o.out << " and " << manifest.write_sidecar(o.out) << '\n';
    } else {
        std::cout << csv.str();
    }
    return 0;
}

int cmd_exit_time(Options& o) {
    const CevParams params = model_of(o);
    const double beta = effective_beta(o);
    cevsim::validate_beta(o.p, beta);
    const SchemeConfig scheme = cevsim::make_scheme(o.delta, beta, o.t);
    const double upper = 1.0;
    const McConfig mc{o.m, o.seed, o.workers};
    const cevsim::ExitTimeEstimate est = cevsim::estimate_exit_time(params, scheme, upper, mc);

    std::optional<double> psi_ref;
    if (params.x0 >= 0.0 && params.x0 <= 1.0) {
        psi_ref = cevsim::DiffusionFunctions(params).psi(params.x0);
    }

    std::cout << "mean_exit_time = " << format_sig(est.mean) << "  stderr = "
              << format_sig(est.stderr_value) << "  ci99 = [" << format_sig(est.ci_lo) << ", "
              << format_sig(est.ci_hi) << "]\n";
    std::cout << "censored_fraction = " << format_sig(est.censored_fraction) << "  strip = ("
              << format_sig(scheme.threshold) << ", " << format_sig(upper) << ")  t_max = "
              << format_sig(scheme.t_max) << '\n';
    if (psi_ref) {
        std::cout << "psi(x0) = " << format_sig(*psi_ref) << "  diff = "
                  << format_sig(est.mean - *psi_ref) << '\n';
    }

    if (!o.out.empty()) {
        cevsim::CsvTable csv({"delta", "threshold", "upper", "mean", "stderr", "ci_lo", "ci_hi",
                              "censored_fraction", "psi_ref", "diff"});
        csv.add_row({format_sig(scheme.delta), format_sig(scheme.threshold), format_sig(upper),
                     format_sig(est.mean), format_sig(est.stderr_value), format_sig(est.ci_lo),
                     format_sig(est.ci_hi), format_sig(est.censored_fraction),
                     psi_ref ? format_sig(*psi_ref) : "",
                     psi_ref ? format_sig(est.mean - *psi_ref) : ""});
        csv.write_file(o.out);
        const auto manifest = make_manifest(
            "exit-time",
            inputs_json(o, beta,
                        {{"delta", o.delta}, {"upper", upper}, {"out", o.out}}));
        std::cout << "wrote " << o.out << " and " << manifest.write_sidecar(o.out) << '\n';
    }
    return 0;
}

int run_sweep(Options& o, const char* command, bool require_half) {
    const CevParams params = model_of(o);
    const double beta = effective_beta(o);
    cevsim::validate_beta(o.p, beta);
    if (require_half && o.p != 0.5) {
        throw ConfigError("fig1 requires p = 0.5 (closed-form truth); use sweep otherwise");
    }
    if (o.deltas.empty()) {
        throw ConfigError("no step sizes: pass --deltas d1,d2,...");
    }

    const std::optional<double> exact = exact_probability(params, o.t);
    const McConfig mc{o.m, o.seed, o.workers};
    const auto rows =
        cevsim::sweep_delta(params, beta, o.t, o.deltas, mc, exact, o.threshold_zero);

    cevsim::CsvTable csv(kEstimateHeader);
    std::vector<cevsim::ErrorPlotPoint> plot;
    for (const auto& row : rows) {
        if (!row.estimate) {
            std::cerr << "delta = " << format_sig(row.delta) << ": " << row.error << '\n';
            continue;
        }
        csv.add_row(estimate_row(row.delta, row.threshold, *row.estimate, exact));
        if (exact && row.estimate->err_rel_pct) {
            plot.push_back(cevsim::ErrorPlotPoint{
                row.delta, *row.estimate->err_rel_pct,
                cevsim::relative_error(row.estimate->ci_lo, *exact),
                cevsim::relative_error(row.estimate->ci_hi, *exact)});
        }
    }
    std::cout << csv.str();

    const auto manifest = make_manifest(
        command, inputs_json(o, beta,
                             {{"deltas", o.deltas}, {"out", o.out}, {"svg", o.svg}}));
    if (!o.out.empty()) {
        csv.write_file(o.out);
        std::cout << "wrote " << o.out << " and " << manifest.write_sidecar(o.out) << '\n';
    }
    if (!o.svg.empty()) {
        if (plot.empty()) {
            std::cerr << "no error data to plot (p != 0.5?); skipping " << o.svg << '\n';
        } else {
            std::ostringstream title;
            title << "relative absorption-probability error, mu=" << o.mu
                  << " sigma=" << o.sigma << " p=" << o.p << " x0=" << o.x0 << " t=" << o.t
                  << " m=" << o.m;
            cevsim::write_error_plot(o.svg, plot, title.str(), manifest.to_json().dump());
            std::cout << "wrote " << o.svg << '\n';
        }
    }
    return 0;
}

int cmd_analytic(Options& o) {
    const CevParams params = model_of(o);
    cevsim::DiffusionFunctions df(params);
    const bool x_in_unit = o.x >= 0.0 && o.x <= 1.0;

    if (o.only_phi || o.only_psi) {
        if (!x_in_unit) throw ConfigError("phi/psi require x in [0, 1]");
        std::cout << format_sig(o.only_phi ? df.phi(o.x) : df.psi(o.x)) << '\n';
        return 0;
    }

    if (params.p == 0.5) {
        std::cout << "absorption_cdf_half(x=" << format_sig(o.x) << ", t=" << format_sig(o.t)
                  << ") = " << format_sig(cevsim::absorption_cdf_half(params.mu, params.sigma,
                                                                      o.x, o.t))
                  << '\n';
    } else {
        std::cout << "absorption_cdf_half: closed form available only for p = 0.5\n";
    }
    std::cout << "absorption_atom(x=" << format_sig(o.x)
              << ") = " << format_sig(cevsim::absorption_atom(params.mu, params.sigma, o.x))
              << '\n';
    if (x_in_unit) {
        std::cout << "phi(" << format_sig(o.x) << ") = " << format_sig(df.phi(o.x)) << '\n';
        std::cout << "psi(" << format_sig(o.x) << ") = " << format_sig(df.psi(o.x)) << '\n';
    }
    if (o.x > 0.0 && o.x < 1.0) {
        const double res_phi =
            cevsim::generator_apply([&](double y) { return df.phi(y); }, o.x, params);
        const double res_psi =
            cevsim::generator_apply([&](double y) { return df.psi(y); }, o.x, params) + 1.0;
        std::cout << "|L phi|(" << format_sig(o.x) << ") = " << format_sig(std::fabs(res_phi))
                  << '\n';
        std::cout << "|L psi + 1|(" << format_sig(o.x) << ") = "
                  << format_sig(std::fabs(res_psi)) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo absorption times of the CEV diffusion "
                 "(clipped Euler-Maruyama, mollified stopping rule)"};
    app.require_subcommand(1);
    Options o;

    CLI::App* estimate = app.add_subcommand(
        "estimate", "estimate P(absorption by time t) for one step size");
    add_model_flags(estimate, o);
    add_run_flags(estimate, o);
    estimate->add_flag("--threshold-zero", o.threshold_zero,
                       "experimental: stop at 0 instead of delta^beta");

    CLI::App* exit_time = app.add_subcommand(
        "exit-time", "mean exit time of the strip (delta^beta, 1) from x0");
    add_model_flags(exit_time, o);
    add_run_flags(exit_time, o);

    CLI::App* fig1 = app.add_subcommand(
        "fig1", "relative-error sweep at the reference parameters (p = 0.5)");
    add_model_flags(fig1, o);
    add_run_flags(fig1, o);
    fig1->add_option("--deltas", o.deltas, "comma-separated step sizes")->delimiter(',');
    fig1->add_option("--svg", o.svg, "SVG plot path");

    CLI::App* sweep = app.add_subcommand("sweep", "relative-error sweep over step sizes");
    add_model_flags(sweep, o);
    add_run_flags(sweep, o);
    sweep->add_option("--deltas", o.deltas, "comma-separated step sizes")
        ->delimiter(',')
        ->required();
    sweep->add_option("--svg", o.svg, "SVG plot path");
    sweep->add_flag("--threshold-zero", o.threshold_zero,
                    "experimental: stop at 0 instead of delta^beta");

    CLI::App* analytic = app.add_subcommand(
        "analytic", "closed-form and quadrature reference values");
    add_model_flags(analytic, o);
    analytic->add_option("--x", o.x, "evaluation point");
    analytic->add_option("--t", o.t, "time horizon for the absorption CDF");
    analytic->add_option("--config", o.config, "JSON config file");
    analytic->add_flag("--phi", o.only_phi, "print phi(x) only");
    analytic->add_flag("--psi", o.only_psi, "print psi(x) only");

    CLI::App* selftest = app.add_subcommand("selftest", "run the fast invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        apply_config_file(active, o);
        if (estimate->parsed()) return cmd_estimate(o);
        if (exit_time->parsed()) return cmd_exit_time(o);
        if (fig1->parsed()) {
            if (o.deltas.empty()) {
                o.deltas = {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
            }
            if (o.out.empty()) o.out = "fig1.csv";
            if (o.svg.empty()) o.svg = "fig1.svg";
            return run_sweep(o, "fig1", /*require_half=*/true);
        }
        if (sweep->parsed()) return run_sweep(o, "sweep", /*require_half=*/false);
        if (analytic->parsed()) return cmd_analytic(o);
        if (selftest->parsed()) return cevsim::run_selftest(std::cout) ? 0 : kExitRuntime;
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
