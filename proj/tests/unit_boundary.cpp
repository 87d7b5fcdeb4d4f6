#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cevsim/crossing.hpp"
#include "cevsim/engine.hpp"
#include "cevsim/extended_time.hpp"
#include "cevsim/params.hpp"
#include "cevsim/rng.hpp"

using namespace cevsim;

TEST_CASE("beta admissibility is the open interval (0, (1/2)/(1-p))") {
    CHECK_NOTHROW(validate_beta(0.5, 0.5));
    CHECK_THROWS_AS(validate_beta(0.5, 1.0), ConfigError);
    CHECK_NOTHROW(validate_beta(0.75, 1.5));
    CHECK_THROWS_AS(validate_beta(0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(validate_beta(0.5, -0.1), ConfigError);

    for (const double p : {0.5, 0.6, 0.75, 0.9}) {
        const double limit = beta_upper_limit(p);
        CHECK_NOTHROW(validate_beta(p, 0.999 * limit));
        CHECK_THROWS_AS(validate_beta(p, limit), ConfigError);
    }

    // the error names the admissible interval
    try {
        validate_beta(0.5, 1.0);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
}

TEST_CASE("make_scheme derives threshold = delta^beta and validates domains") {
    const SchemeConfig s = make_scheme(1e-3, 0.9, 5.0);
    CHECK(s.threshold == doctest::Approx(std::pow(1e-3, 0.9)).epsilon(1e-15));
    CHECK_THROWS_AS(make_scheme(0.0, 0.9, 5.0), ConfigError);
    CHECK_THROWS_AS(make_scheme(1e-3, 0.9, 0.0), ConfigError);
    CHECK_THROWS_AS(make_scheme(1e-3, -1.0, 5.0), ConfigError);
}

TEST_CASE("interpolated crossing times on linear segments") {
    auto tau = interpolate_crossing_time(0.0, 2.0, 0.0, 1.0, 0.01);
    REQUIRE(tau.has_value());
    CHECK(*tau == doctest::Approx(0.005).epsilon(1e-15));

    tau = interpolate_crossing_time(0.0, 1.5, 0.5, 0.75, 0.01);
    REQUIRE(tau.has_value());
    CHECK(*tau == doctest::Approx(0.0075).epsilon(1e-15));

    CHECK_FALSE(interpolate_crossing_time(0.0, 2.0, 1.5, 1.0, 0.01).has_value());

    // equality cases
    tau = interpolate_crossing_time(3.0, 1.0, 0.5, 1.0, 0.01);
    REQUIRE(tau.has_value());
    CHECK(*tau == 3.0);  // starts on the level
    tau = interpolate_crossing_time(3.0, 1.5, 1.0, 1.0, 0.01);
    REQUIRE(tau.has_value());
    CHECK(*tau == doctest::Approx(3.01).epsilon(1e-15));  // ends on the level

    // upward crossings bracket too
    tau = interpolate_crossing_time(0.0, 0.5, 1.5, 1.0, 0.01);
    REQUIRE(tau.has_value());
    CHECK(*tau == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("grid crossing index nu_a") {
    const std::vector<double> down{1.0, 0.8, 0.4};
    auto idx = grid_crossing_index(down, 0.5);
    REQUIRE(idx.has_value());
    CHECK(*idx == 2);

    const std::vector<double> away{1.0, 1.2, 1.5};
    CHECK_FALSE(grid_crossing_index(away, 0.5).has_value());

    // level equal to the first value: only a later equality or bracketing
    // counts (j >= 1 and the old-endpoint-only touch is excluded)
    const std::vector<double> touch_later{1.0, 1.2, 1.0};
    idx = grid_crossing_index(touch_later, 1.0);
    REQUIRE(idx.has_value());
    CHECK(*idx == 2);
    const std::vector<double> start_only{1.0, 1.2, 1.4};
    CHECK_FALSE(grid_crossing_index(start_only, 1.0).has_value());
}

TEST_CASE("bracketing and interpolation agree away from the degenerate start") {
    NormalStream stream(314, 0);
    int crossings = 0;
    for (int i = 0; i < 20000; ++i) {
        const double x_prev = 2.0 * stream();
        const double x_next = 2.0 * stream();
        const double level = stream();
        if (x_prev == level) continue;
        const bool bracketed = segment_brackets(x_prev, x_next, level);
        const bool interpolated =
            interpolate_crossing_time(0.0, x_prev, x_next, level, 0.5).has_value();
        CHECK(bracketed == interpolated);
        crossings += bracketed ? 1 : 0;
    }
    CHECK(crossings > 1000);  // the generator visits both branches
}

TEST_CASE("rho metric values") {
    CHECK(rho(ExtendedTime::infinite(), ExtendedTime::infinite()) == 0.0);
    CHECK(rho(ExtendedTime{0.0}, ExtendedTime::infinite()) ==
          doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(rho(ExtendedTime{1.0}, ExtendedTime{1.0}) == 0.0);
}

TEST_CASE("rho satisfies the metric axioms on random triples including infinity") {
    NormalStream stream(951, 3);
    auto random_time = [&]() {
        const double u = std::fabs(stream());
        if (u > 2.3) return std::numeric_limits<double>::infinity();
        return std::expm1(2.5 * u);
    };
    int infinities = 0;
    for (int i = 0; i < 10000; ++i) {
        const ExtendedTime a{random_time()}, b{random_time()}, c{random_time()};
        infinities += a.is_infinite() ? 1 : 0;
        CHECK(rho(a, a) == 0.0);
        CHECK(rho(a, b) == rho(b, a));
        CHECK(rho(a, b) >= 0.0);
        CHECK(rho(a, c) <= rho(a, b) + rho(b, c) + 1e-15);
    }
    CHECK(infinities > 50);
}

TEST_CASE("raising the threshold never delays the stop on a shared stream") {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const EmCoefficients c = EmCoefficients::make(params, 1e-2);
    for (std::uint64_t traj = 0; traj < 300; ++traj) {
        for (const auto& [hi, lo] : {std::pair{0.30, 0.05}, std::pair{0.10, 0.02}}) {
            NormalStream s1(777, traj);
            NormalStream s2(777, traj);
            const StopSpec stop_hi{hi, std::numeric_limits<double>::infinity(), 5.0};
            const StopSpec stop_lo{lo, std::numeric_limits<double>::infinity(), 5.0};
            const PathResult r_hi = run_path(params.x0, c, stop_hi, s1);
            const PathResult r_lo = run_path(params.x0, c, stop_lo, s2);
            const double t_hi =
                r_hi.status == PathStatus::hit_lower ? r_hi.time
                                                     : std::numeric_limits<double>::infinity();
            const double t_lo =
                r_lo.status == PathStatus::hit_lower ? r_lo.time
                                                     : std::numeric_limits<double>::infinity();
            CHECK(t_hi <= t_lo);
        }
    }
}
