#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "cevsim/crossing.hpp"
#include "cevsim/extended_time.hpp"
#include "cevsim/params.hpp"
#include "cevsim/rng.hpp"

namespace cevsim {

/// Per-run constants of the Euler-Maruyama recursion. Precomputed once so
/// that every kernel evaluates exactly the same floating-point expression.
struct EmCoefficients {
    double mu;
    double sigma;
    double p;
    double delta;
    double sqrt_delta;
    bool p_is_half;

    static EmCoefficients make(const CevParams& params, double delta) {
        return EmCoefficients{params.mu, params.sigma, params.p,
                              delta,     std::sqrt(delta), params.p == 0.5};
    }
};

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

/// x_prev + mu*(x_prev)^+ * delta + sigma*((x_prev)^+)^p * xi * sqrt(delta).
/// The state itself is not clipped: negative values are left in place and,
/// since both coefficients vanish there, the path freezes.
inline double em_step(double x_prev, double xi, const EmCoefficients& c) {
    const double xp = positive_part(x_prev);
    const double xp_pow = c.p_is_half ? std::sqrt(xp) : std::pow(xp, c.p);
    return x_prev + c.mu * xp * c.delta + c.sigma * xp_pow * xi * c.sqrt_delta;
}

inline double em_step(double x_prev, double xi, const CevParams& params, double delta) {
    return em_step(x_prev, xi, EmCoefficients::make(params, delta));
}

/// Crossing time on a segment already known to bracket the level, with
/// x_prev != x_next. Shared by all kernels.
inline double crossing_time_on_segment(double t_prev, double x_prev, double x_next,
                                       double level, double delta) {
    return t_prev + delta * ((x_prev - level) / (x_prev - x_next));
}

enum class PathStatus : std::uint8_t { hit_lower, hit_upper, censored };

/// Raw per-trajectory kernel output.
struct PathResult {
    PathStatus status;
    double time;       // interpolated crossing time, or t_stop when censored
    std::uint64_t steps;
    double terminal_x;
};

/// Stopping configuration of one run: stop on the first crossing of `lower`
/// (from above) or `upper` (from below; +inf disables it), or at the horizon.
struct StopSpec {
    double lower;
    double upper = std::numeric_limits<double>::infinity();
    double t_stop;
};

inline std::uint64_t step_count_for_horizon(double t_stop, double delta) {
    const double n = std::ceil(t_stop / delta);
    if (!(n >= 1.0) || n > 9.0e15) {
        throw ConfigError("horizon/step combination yields an unusable step count");
    }
    return static_cast<std::uint64_t>(n);
}

/// Reference path driver: advances the recursion one step at a time, pulling
/// draws from `draw`, and stops at the first segment whose linear
/// interpolant crosses a stopping level (or at the horizon). A crossing
/// interpolated past t_stop is truncated by the horizon and reported as
/// censored. Consumes exactly `steps` draws.
template <typename DrawSource>
PathResult run_path(double x0, const EmCoefficients& c, const StopSpec& stop,
                    DrawSource&& draw) {
    if (x0 <= stop.lower) return PathResult{PathStatus::hit_lower, 0.0, 0, x0};
    if (x0 >= stop.upper) return PathResult{PathStatus::hit_upper, 0.0, 0, x0};

    const std::uint64_t n_steps = step_count_for_horizon(stop.t_stop, c.delta);
    double x = x0;
    for (std::uint64_t j = 1; j <= n_steps; ++j) {
        const double xi = draw();
        const double x_next = em_step(x, xi, c);
        const bool crossed_lower = x_next <= stop.lower;
        const bool crossed_upper = x_next >= stop.upper;
        if (crossed_lower || crossed_upper) {
            const double level = crossed_lower ? stop.lower : stop.upper;
            const double t_prev = static_cast<double>(j - 1) * c.delta;
            const double tau = crossing_time_on_segment(t_prev, x, x_next, level, c.delta);
            if (tau <= stop.t_stop) {
                return PathResult{crossed_lower ? PathStatus::hit_lower : PathStatus::hit_upper,
                                  tau, j, x_next};
            }
            return PathResult{PathStatus::censored, stop.t_stop, j, x_next};
        }
        x = x_next;
    }
    return PathResult{PathStatus::censored, stop.t_stop, n_steps, x};
}

/// Outcome of one stopped trajectory.
struct TrajectoryOutcome {
    bool hit;
    ExtendedTime hit_time;
    std::uint64_t steps_used;
    double terminal_x;

    friend bool operator==(const TrajectoryOutcome& a, const TrajectoryOutcome& b) {
        return a.hit == b.hit && a.hit_time == b.hit_time && a.steps_used == b.steps_used &&
               a.terminal_x == b.terminal_x;
    }
};

inline TrajectoryOutcome to_trajectory_outcome(const PathResult& r) {
    const bool hit = r.status == PathStatus::hit_lower;
    return TrajectoryOutcome{hit, hit ? ExtendedTime::finite(r.time) : ExtendedTime::infinite(),
                             r.steps, r.terminal_x};
}

/// Simulates one trajectory stopped at scheme.threshold, truncated at
/// scheme.t_max. The draw source must yield i.i.d. N(0,1) values.
template <typename DrawSource>
TrajectoryOutcome simulate_to_stop(const CevParams& params, const SchemeConfig& scheme,
                                   DrawSource&& draw) {
    params.validate();
    if (!(scheme.threshold < params.x0)) {
        throw ConfigError("stopping threshold delta^beta must be below x0 "
                          "(the trajectory would be stopped at time 0)");
    }
    const EmCoefficients c = EmCoefficients::make(params, scheme.delta);
    const StopSpec stop{scheme.threshold, std::numeric_limits<double>::infinity(),
                        scheme.t_max};
    return to_trajectory_outcome(run_path(params.x0, c, stop, draw));
}

}  // namespace cevsim
