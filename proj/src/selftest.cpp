#include "cevsim/selftest.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <vector>

#include "cevsim/analytic.hpp"
#include "cevsim/crossing.hpp"
#include "cevsim/engine.hpp"
#include "cevsim/extended_time.hpp"
#include "cevsim/kernels.hpp"
#include "cevsim/monte_carlo.hpp"
#include "cevsim/rng.hpp"

namespace cevsim {

namespace {

class Reporter {
public:
    explicit Reporter(std::ostream& out) : out_(out) {}

    void check(const std::string& name, bool ok, const std::string& detail) {
        out_ << (ok ? "[ ok ] " : "[FAIL] ") << name;
        if (!detail.empty()) out_ << " (" << detail << ")";
        out_ << '\n';
        if (!ok) failed_ = true;
    }

    bool all_passed() const { return !failed_; }

private:
    std::ostream& out_;
    bool failed_ = false;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void check_analytic(Reporter& rep) {
    const double cdf0 = absorption_cdf_half(0.0, 1.0, 1.0, 5.0);
    rep.check("analytic.cdf(mu=0)", std::fabs(cdf0 - 0.670320046035639) < 1e-12,
              "value " + fmt(cdf0));
    const double cdf_mu = absorption_cdf_half(0.5, 1.0, 1.0, 5.0);
    rep.check("analytic.cdf(mu=0.5)", std::fabs(cdf_mu - 0.336409708997154) < 1e-12,
              "value " + fmt(cdf_mu));

    DiffusionFunctions df0(CevParams{0.0, 1.0, 0.5, 1.0});
    const double psi_half = df0.psi(0.5);
    rep.check("analytic.psi(0.5)==ln2", std::fabs(psi_half - std::log(2.0)) < 1e-8,
              "value " + fmt(psi_half));

    DiffusionFunctions df1(CevParams{1.0, 1.0, 0.5, 1.0});
    const double phi_half = df1.phi(0.5, ScaleRoute::quadrature);
    rep.check("analytic.phi(0.5,mu=1)",
              std::fabs(phi_half - 0.731058578630005) < 1e-8, "value " + fmt(phi_half));

    for (const CevParams params :
         {CevParams{1.0, 1.0, 0.5, 1.0}, CevParams{0.5, 1.0, 0.75, 1.0}}) {
        DiffusionFunctions df(params);
        double worst_phi = 0.0;
        double worst_psi = 0.0;
        for (int i = 1; i <= 9; ++i) {
            const double x = 0.1 * i;
            worst_phi = std::max(
                worst_phi, std::fabs(generator_apply(
                               [&](double y) { return df.phi(y); }, x, params)));
            worst_psi = std::max(
                worst_psi, std::fabs(generator_apply(
                                         [&](double y) { return df.psi(y); }, x, params) +
                                     1.0));
        }
        std::ostringstream name;
        name << "analytic.residuals(mu=" << params.mu << ",p=" << params.p << ")";
        rep.check(name.str(), worst_phi <= 1e-4 && worst_psi <= 1e-4,
                  "|Lphi| " + fmt(worst_phi) + ", |Lpsi+1| " + fmt(worst_psi));
    }

    double worst_atom = 0.0;
    for (const double mu : {0.1, 0.5, 1.0}) {
        worst_atom = std::max(worst_atom, std::fabs(absorption_cdf_half(mu, 1.0, 1.0, 1e6) -
                                                    absorption_atom(mu, 1.0, 1.0)));
    }
    rep.check("analytic.cdf->atom(t=1e6)", worst_atom <= 1e-6, "max diff " + fmt(worst_atom));
}

void check_rng(Reporter& rep) {
    constexpr std::uint64_t kDraws = 1000000;
    constexpr std::uint64_t kPerStream = 1000;
    double sum = 0.0, sum_sq = 0.0, tail = 0.0;
    for (std::uint64_t t = 0; t < kDraws / kPerStream; ++t) {
        NormalStream stream(2024, t);
        for (std::uint64_t i = 0; i < kPerStream; ++i) {
            const double z = stream();
            sum += z;
            sum_sq += z * z;
            if (std::fabs(z) >= 2.0) tail += z * z;
        }
    }
    const double mean = sum / kDraws;
    const double var = sum_sq / kDraws - mean * mean;
    const double tail_mean = tail / kDraws;
    rep.check("rng.moments", std::fabs(mean) <= 4e-3 && std::fabs(var - 1.0) <= 1e-2,
              "mean " + fmt(mean) + ", var " + fmt(var));
    const double bound = std::sqrt(3.0) / std::sqrt(2.0) * std::exp(-1.0);
    rep.check("rng.tail", tail_mean <= bound,
              "E[z^2;|z|>=2] " + fmt(tail_mean) + " <= " + fmt(bound));
}

void check_determinism(Reporter& rep) {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    McConfig mc;
    mc.m = 2000;
    mc.master_seed = 7;

    const McEstimate a = estimate_absorption(params, scheme, 5.0, mc);

    const bool mutate = std::getenv("CEVSIM_SELFTEST_MUTATE") != nullptr;
    if (mutate) rng_detail::g_counter_increment = rng_detail::kGolden ^ 0x4ULL;
    McConfig mc4 = mc;
    mc4.worker_hint = 4;
    const McEstimate b = estimate_absorption(params, scheme, 5.0, mc4);
    if (mutate) rng_detail::g_counter_increment = rng_detail::kGolden;

    rep.check("mc.determinism", a == b,
              "p_hat " + fmt(a.p_hat) + " vs " + fmt(b.p_hat) +
                  (mutate ? " [mutated mixing constant]" : ""));
}

void check_kernel_equivalence(Reporter& rep) {
    if (!kernel_available(KernelKind::avx2)) {
        rep.check("kernels.equivalence", true, "avx2 unavailable, scalar only");
        return;
    }
    bool equal = true;
    for (const double p : {0.5, 0.75}) {
        const CevParams params{0.1, 1.0, p, 1.0};
        const SimJob job = SimJob::make(
            params, 1e-2, StopSpec{0.015, std::numeric_limits<double>::infinity(), 5.0}, 99);
        constexpr std::size_t kCount = 128;
        std::vector<PathResult> a(kCount), b(kCount);
        run_batch_scalar(job, 0, kCount, a.data());
        run_batch_avx2(job, 0, kCount, b.data());
        for (std::size_t i = 0; i < kCount; ++i) {
            equal = equal && a[i].status == b[i].status && a[i].time == b[i].time &&
                    a[i].steps == b[i].steps && a[i].terminal_x == b[i].terminal_x;
        }
    }
    rep.check("kernels.equivalence", equal, "scalar vs avx2, 256 paths");
}

void check_metric(Reporter& rep) {
    const double inf = std::numeric_limits<double>::infinity();
    bool ok = true;
    NormalStream stream(5150, 0);
    auto random_time = [&]() {
        const double u = std::fabs(stream());
        if (u > 2.4) return inf;  // ~1.6% of samples at infinity
        return std::exp(3.0 * u) - 1.0;
    };
    for (int i = 0; i < 10000 && ok; ++i) {
        const ExtendedTime a{random_time()}, b{random_time()}, c{random_time()};
        ok = ok && rho(a, a) == 0.0;
        ok = ok && rho(a, b) == rho(b, a);
        ok = ok && rho(a, c) <= rho(a, b) + rho(b, c) + 1e-15;
    }
    ok = ok && rho(ExtendedTime::infinite(), ExtendedTime::infinite()) == 0.0;
    ok = ok && std::fabs(rho(ExtendedTime{0.0}, ExtendedTime::infinite()) - M_PI / 2) < 1e-15;
    rep.check("metric.rho", ok, "1e4 random triples incl. infinity");
}

void check_fixed_point(Reporter& rep) {
    const CevParams params{0.7, 1.3, 0.75, 1.0};
    const EmCoefficients c = EmCoefficients::make(params, 1e-3);
    NormalStream stream(31337, 0);
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
        const double x = -std::fabs(stream());  // state in (-inf, 0]
        ok = em_step(x, stream(), c) == x;
    }
    ok = ok && em_step(0.0, 5.0, c) == 0.0;
    rep.check("engine.absorbing_fixed_point", ok, "1e4 non-positive states");
}

void check_tau_nu(Reporter& rep) {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    const EmCoefficients c = EmCoefficients::make(params, scheme.delta);
    bool ok = true;
    for (std::uint64_t traj = 0; traj < 1000 && ok; ++traj) {
        NormalStream stream(8888, traj);
        const TrajectoryOutcome outcome = simulate_to_stop(params, scheme, stream);
        if (!outcome.hit) continue;
        // replay the grid values and locate the crossing index
        NormalStream replay(8888, traj);
        std::vector<double> grid{params.x0};
        for (std::uint64_t j = 0; j < outcome.steps_used; ++j) {
            grid.push_back(em_step(grid.back(), replay(), c));
        }
        const auto idx = grid_crossing_index(grid, scheme.threshold);
        ok = idx.has_value() && *idx == outcome.steps_used &&
             std::fabs(outcome.hit_time.value - scheme.delta * static_cast<double>(*idx)) <=
                 scheme.delta;
    }
    rep.check("engine.tau_vs_nu", ok, "|tau - nu| <= delta on 1e3 hit paths");
}

}  // namespace

bool run_selftest(std::ostream& out) {
    Reporter rep(out);
    check_analytic(rep);
    check_rng(rep);
    check_determinism(rep);
    check_kernel_equivalence(rep);
    check_metric(rep);
    check_fixed_point(rep);
    check_tau_nu(rep);
    out << (rep.all_passed() ? "selftest: all checks passed\n"
                             : "selftest: FAILURES detected\n");
    return rep.all_passed();
}

}  // namespace cevsim
