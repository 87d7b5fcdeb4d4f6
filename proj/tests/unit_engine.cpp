#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cevsim/crossing.hpp"
#include "cevsim/engine.hpp"
#include "cevsim/rng.hpp"

using namespace cevsim;

TEST_CASE("em_step evaluates the clipped recursion") {
    CHECK(em_step(1.0, 0.0, CevParams{0.0, 1.0, 0.5, 1.0}, 0.01) == 1.0);
    CHECK(em_step(0.0, 5.0, CevParams{3.0, 1.0, 0.5, 1.0}, 0.01) == 0.0);
    CHECK(em_step(1.0, 1.0, CevParams{0.1, 1.0, 0.5, 1.0}, 0.01) ==
          doctest::Approx(1.101).epsilon(1e-14));
    CHECK(em_step(-0.2, 2.0, CevParams{1.0, 1.0, 0.5, 1.0}, 0.01) == -0.2);
}

TEST_CASE("non-positive states are fixed points for any draw") {
    const EmCoefficients c = EmCoefficients::make(CevParams{0.7, 1.3, 0.75, 1.0}, 1e-3);
    NormalStream stream(606, 0);
    for (int i = 0; i < 10000; ++i) {
        const double x = -std::fabs(stream());
        const double xi = stream();
        CHECK(em_step(x, xi, c) == x);
    }
    CHECK(em_step(0.0, 7.5, c) == 0.0);
}

TEST_CASE("one-step mean and variance match the scheme coefficients") {
    const CevParams params{0.3, 1.1, 0.5, 1.0};
    const double x = 0.7;
    const double delta = 0.01;
    const EmCoefficients c = EmCoefficients::make(params, delta);
    constexpr int kN = 1000000;
    NormalStream stream(1234, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < kN; ++i) {
        const double y = em_step(x, stream(), c);
        sum += y;
        sum_sq += y * y;
    }
    const double mean = sum / kN;
    const double var = (sum_sq - kN * mean * mean) / (kN - 1);
    const double mean_true = x + params.mu * x * delta;
    const double var_true = params.sigma * params.sigma * std::pow(x, 2.0 * params.p) * delta;
    const double mean_se = std::sqrt(var_true / kN);
    const double var_se = var_true * std::sqrt(2.0 / kN);
    CHECK(std::fabs(mean - mean_true) <= 4.0 * mean_se);
    CHECK(std::fabs(var - var_true) <= 4.0 * var_se);
}

TEST_CASE("simulate_to_stop rejects a threshold at or above x0") {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    scheme.threshold = 2.0;
    NormalStream stream(1, 0);
    CHECK_THROWS_AS(simulate_to_stop(params, scheme, stream), ConfigError);
}

TEST_CASE("a flat driftless path never crosses and uses ceil(t_max/delta) draws") {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const SchemeConfig scheme = make_scheme(0.3, 0.9, 1.0);
    auto zero_stream = [] { return 0.0; };
    const TrajectoryOutcome out = simulate_to_stop(params, scheme, zero_stream);
    CHECK_FALSE(out.hit);
    CHECK(out.hit_time.is_infinite());
    CHECK(out.steps_used == 4);  // ceil(1.0 / 0.3)
    CHECK(out.terminal_x == 1.0);
}

TEST_CASE("repeated runs on the same seed are identical") {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    for (std::uint64_t traj = 0; traj < 32; ++traj) {
        NormalStream s1(42, traj);
        NormalStream s2(42, traj);
        const TrajectoryOutcome a = simulate_to_stop(params, scheme, s1);
        const TrajectoryOutcome b = simulate_to_stop(params, scheme, s2);
        CHECK(a == b);
    }
}

TEST_CASE("steps_used equals the number of draws consumed") {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    for (std::uint64_t traj = 0; traj < 64; ++traj) {
        NormalStream stream(2025, traj);
        const TrajectoryOutcome out = simulate_to_stop(params, scheme, stream);
        CHECK(out.steps_used == stream.draws_consumed());
    }
}

TEST_CASE("crossing times sit on their segment and within delta of nu") {
    const CevParams params{0.0, 1.0, 0.5, 1.0};
    const SchemeConfig scheme = make_scheme(1e-2, 0.9, 5.0);
    const EmCoefficients c = EmCoefficients::make(params, scheme.delta);
    int hits = 0;
    for (std::uint64_t traj = 0; traj < 1000; ++traj) {
        NormalStream stream(5555, traj);
        const TrajectoryOutcome out = simulate_to_stop(params, scheme, stream);
        if (!out.hit) continue;
        ++hits;
        const double tau = out.hit_time.value;
        const double t_prev = static_cast<double>(out.steps_used - 1) * scheme.delta;
        const double t_next = static_cast<double>(out.steps_used) * scheme.delta;
        CHECK(tau >= t_prev);
        CHECK(tau <= t_next);

        NormalStream replay(5555, traj);
        std::vector<double> grid{params.x0};
        for (std::uint64_t j = 0; j < out.steps_used; ++j) {
            grid.push_back(em_step(grid.back(), replay(), c));
        }
        const auto nu_index = grid_crossing_index(grid, scheme.threshold);
        REQUIRE(nu_index.has_value());
        CHECK(*nu_index == out.steps_used);
        const double nu = scheme.delta * static_cast<double>(*nu_index);
        CHECK(std::fabs(tau - nu) <= scheme.delta);
    }
    CHECK(hits > 500);  // absorption probability ~2/3 at these parameters
}

TEST_CASE("a crossing interpolated past the horizon is censored") {
    // one deterministic step down through the level, but with t_stop inside
    // the segment before the crossing point
    const CevParams params{-80.0, 1.0, 0.5, 1.0};
    const EmCoefficients c = EmCoefficients::make(params, 1.0);
    const StopSpec stop{0.5, std::numeric_limits<double>::infinity(), 0.1};
    auto zero_stream = [] { return 0.0; };
    // x_1 = 1 - 80*1 = -79, crossing at tau = (1-0.5)/(1+79) ~ 0.0063 <= 0.1: hit.
    const PathResult hit = run_path(params.x0, c, stop, zero_stream);
    CHECK(hit.status == PathStatus::hit_lower);

    const StopSpec tight{0.5, std::numeric_limits<double>::infinity(), 0.003};
    const PathResult censored = run_path(params.x0, c, tight, zero_stream);
    CHECK(censored.status == PathStatus::censored);
    CHECK(censored.time == 0.003);
    CHECK(censored.steps == 1);
}

TEST_CASE("corridor stopping reports the first boundary reached") {
    const CevParams params{0.0, 1.0, 0.5, 0.5};
    const EmCoefficients c = EmCoefficients::make(params, 1e-2);
    const StopSpec stop{0.1, 1.0, 50.0};
    int lower = 0, upper = 0;
    for (std::uint64_t traj = 0; traj < 400; ++traj) {
        NormalStream stream(8080, traj);
        const PathResult r = run_path(params.x0, c, stop, stream);
        if (r.status == PathStatus::hit_lower) {
            ++lower;
            CHECK(r.terminal_x <= 0.1);
        } else if (r.status == PathStatus::hit_upper) {
            ++upper;
            CHECK(r.terminal_x >= 1.0);
        }
        CHECK(r.time <= 50.0);
    }
    CHECK(lower > 50);
    CHECK(upper > 50);
}

TEST_CASE("degenerate starts stop at time zero") {
    const EmCoefficients c = EmCoefficients::make(CevParams{0.0, 1.0, 0.5, 1.0}, 1e-2);
    auto zero_stream = [] { return 0.0; };
    const PathResult at_upper = run_path(1.0, c, StopSpec{0.1, 1.0, 5.0}, zero_stream);
    CHECK(at_upper.status == PathStatus::hit_upper);
    CHECK(at_upper.time == 0.0);
    CHECK(at_upper.steps == 0);
}
