#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cevsim/engine.hpp"
#include "cevsim/kernels.hpp"
#include "cevsim/params.hpp"

namespace cevsim {

/// z for a two-sided 99% CLT interval.
inline constexpr double kZ99 = 2.5758;

struct McConfig {
    std::uint64_t m = 100000;
    std::uint64_t master_seed = 42;
    unsigned worker_hint = 0;  // 0: hardware concurrency; never affects results

    void validate() const {
        if (m < 1) throw ConfigError("number of trajectories m must be at least 1");
    }
};

struct McEstimate {
    double p_hat;
    double stderr_value;  // sqrt(p_hat (1 - p_hat) / m)
    double ci_lo;         // clipped to [0, 1]
    double ci_hi;
    std::uint64_t m;
    std::optional<double> err_rel_pct;

    friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

struct ExitTimeEstimate {
    double mean;
    double stderr_value;
    double ci_lo;
    double ci_hi;
    double censored_fraction;
    std::uint64_t m;
};

/// (p_hat - p_exact) / p_exact * 100.
double relative_error(double p_hat, double p_exact);

/// Fraction of M trajectories whose mollified stopping time is <= t, with
/// CLT standard error and 99% interval. Deterministic in
/// (params, scheme, t, mc.m, mc.master_seed); worker_hint and kernel choice
/// never change the result. `exact`, when supplied, fills err_rel_pct.
McEstimate estimate_absorption(const CevParams& params, const SchemeConfig& scheme, double t,
                               const McConfig& mc, std::optional<double> exact = {});

/// Mean time to leave the strip (scheme.threshold, upper), censored at
/// scheme.t_max; censored paths contribute the censoring time and their
/// fraction is reported.
ExitTimeEstimate estimate_exit_time(const CevParams& params, const SchemeConfig& scheme,
                                    double upper, const McConfig& mc);

struct SweepRow {
    double delta;
    double threshold;
    std::optional<McEstimate> estimate;
    std::string error;  // per-row failure; the sweep continues past it
};

/// One estimate per delta, rows ordered by decreasing delta, each row on an
/// independently derived seed. threshold_zero switches to the experimental
/// tau_0 stopping rule (threshold 0 instead of delta^beta).
std::vector<SweepRow> sweep_delta(const CevParams& params, double beta, double t,
                                  std::vector<double> deltas, const McConfig& mc,
                                  std::optional<double> exact = {},
                                  bool threshold_zero = false);

/// Documented derivation of the per-row sweep seed.
std::uint64_t sweep_row_seed(std::uint64_t master_seed, std::size_t row_index);

}  // namespace cevsim
