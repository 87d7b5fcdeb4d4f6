// Statistical properties of the Monte Carlo estimators at desk scale.
// Slower than the unit suites; all seeds are fixed, so the checks are
// deterministic rather than flaky.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cevsim/analytic.hpp"
#include "cevsim/monte_carlo.hpp"

using namespace cevsim;

namespace {
const CevParams kFigureParams{0.0, 1.0, 0.5, 1.0};
const double kExact = 0.670320046035639;
}  // namespace

TEST_CASE("absorption estimate brackets the exact value at delta = 1e-2") {
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    McConfig mc;
    mc.m = 100000;
    mc.master_seed = 42;
    const McEstimate est = estimate_absorption(kFigureParams, scheme, 5.0, mc, kExact);
    // 4 sigma of MC noise plus a 2% absolute allowance for the coarse step
    CHECK(std::fabs(est.p_hat - kExact) <= 4.0 * est.stderr_value + 0.02);
    CHECK(est.err_rel_pct.has_value());
}

TEST_CASE("a larger threshold (smaller beta) absorbs earlier") {
    const double t = 5.0;
    McConfig mc;
    mc.m = 20000;
    mc.master_seed = 11;
    const SchemeConfig wide = make_scheme(1e-2, 0.7, t);    // threshold ~ 0.0398
    const SchemeConfig narrow = make_scheme(1e-2, 0.95, t);  // threshold ~ 0.0126
    const McEstimate p_wide = estimate_absorption(kFigureParams, wide, t, mc);
    McConfig mc2 = mc;
    mc2.master_seed = 12;
    const McEstimate p_narrow = estimate_absorption(kFigureParams, narrow, t, mc2);
    const double combined =
        std::sqrt(p_wide.stderr_value * p_wide.stderr_value +
                  p_narrow.stderr_value * p_narrow.stderr_value);
    CHECK(p_wide.p_hat >= p_narrow.p_hat - 2.0 * combined);
}

TEST_CASE("99% CI covers the large-M limit in at least 95% of repetitions") {
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);

    McConfig big;
    big.m = 1000000;
    big.master_seed = 555;
    const double limit = estimate_absorption(kFigureParams, scheme, 5.0, big).p_hat;

    constexpr int kReps = 200;
    int covered = 0;
    for (int rep = 0; rep < kReps; ++rep) {
        McConfig mc;
        mc.m = 10000;
        mc.master_seed = sweep_row_seed(90210, static_cast<std::size_t>(rep));
        const McEstimate est = estimate_absorption(kFigureParams, scheme, 5.0, mc);
        if (est.ci_lo <= limit && limit <= est.ci_hi) ++covered;
    }
    CHECK(covered >= static_cast<int>(0.95 * kReps));
}
