#include "cevsim/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "cevsim/rng.hpp"

namespace cevsim {

namespace {

constexpr std::uint64_t kBlockSize = 4096;

// Neumaier compensated summation; used in a fixed order so reductions are
// bit-identical for any worker count.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

unsigned resolve_workers(unsigned hint, std::uint64_t n_blocks) {
    unsigned w = hint != 0 ? hint : std::max(1u, std::thread::hardware_concurrency());
    w = std::min<unsigned>(w, 256);
    if (n_blocks < w) w = static_cast<unsigned>(n_blocks);
    return std::max(1u, w);
}

// Runs m trajectories in fixed blocks; `consume` is called once per block
// (concurrently, but each block index exactly once) with that block's
// results. Callers store per-block partials and combine them in block order.
void run_farm(const SimJob& job, std::uint64_t m, unsigned worker_hint,
              const std::function<void(std::size_t, const PathResult*, std::size_t)>& consume) {
    const std::uint64_t n_blocks = (m + kBlockSize - 1) / kBlockSize;
    const unsigned workers = resolve_workers(worker_hint, n_blocks);
    const BatchFn kernel = kernel_fn(select_kernel());

    auto worker_loop = [&](std::atomic<std::uint64_t>& next) {
        std::vector<PathResult> buffer(kBlockSize);
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) break;
            const std::uint64_t first = b * kBlockSize;
            const std::size_t count = static_cast<std::size_t>(std::min(kBlockSize, m - first));
            kernel(job, first, count, buffer.data());
            consume(static_cast<std::size_t>(b), buffer.data(), count);
        }
    };

    if (workers == 1) {
        std::atomic<std::uint64_t> next{0};
        worker_loop(next);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                worker_loop(next);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(std::numeric_limits<std::uint64_t>::max());
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::pair<double, double> clip_unit_interval(double lo, double hi) {
    return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

}  // namespace

double relative_error(double p_hat, double p_exact) {
    if (!(p_exact > 0.0)) throw ConfigError("relative error requires a positive exact value");
    return (p_hat - p_exact) / p_exact * 100.0;
}

McEstimate estimate_absorption(const CevParams& params, const SchemeConfig& scheme, double t,
                               const McConfig& mc, std::optional<double> exact) {
    params.validate();
    mc.validate();
    if (scheme.threshold != 0.0) {
        validate_beta(params.p, scheme.beta);
    }
    if (!(scheme.threshold < params.x0)) {
        throw ConfigError("threshold delta^beta = " + std::to_string(scheme.threshold) +
                          " must be below x0 = " + std::to_string(params.x0) +
                          " (the trajectory would be stopped at time 0)");
    }
    if (!(t > 0.0) || t > scheme.t_max) {
        throw ConfigError("estimation horizon t must lie in (0, t_max]");
    }

    const SimJob job = SimJob::make(
        params, scheme.delta,
        StopSpec{scheme.threshold, std::numeric_limits<double>::infinity(), t},
        mc.master_seed);

    const std::size_t n_blocks =
        static_cast<std::size_t>((mc.m + kBlockSize - 1) / kBlockSize);
    std::vector<std::uint64_t> block_hits(n_blocks, 0);
    run_farm(job, mc.m, mc.worker_hint,
             [&](std::size_t b, const PathResult* r, std::size_t n) {
                 std::uint64_t hits = 0;
                 for (std::size_t i = 0; i < n; ++i) {
                     hits += r[i].status == PathStatus::hit_lower ? 1 : 0;
                 }
                 block_hits[b] = hits;
             });

    std::uint64_t hits = 0;
    for (const auto h : block_hits) hits += h;

    const double m_d = static_cast<double>(mc.m);
    const double p_hat = static_cast<double>(hits) / m_d;
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / m_d);
    const auto [lo, hi] = clip_unit_interval(p_hat - kZ99 * se, p_hat + kZ99 * se);

    McEstimate est{p_hat, se, lo, hi, mc.m, std::nullopt};
    if (exact) est.err_rel_pct = relative_error(p_hat, *exact);
    return est;
}

ExitTimeEstimate estimate_exit_time(const CevParams& params, const SchemeConfig& scheme,
                                    double upper, const McConfig& mc) {
    params.validate();
    mc.validate();
    validate_beta(params.p, scheme.beta);
    const double lower = scheme.threshold;
    if (!(lower < upper)) throw ConfigError("exit-time strip requires threshold < upper level");
    if (params.x0 < lower || params.x0 > upper) {
        throw ConfigError("x0 must lie in the strip [threshold, upper]");
    }

    const SimJob job = SimJob::make(params, scheme.delta, StopSpec{lower, upper, scheme.t_max},
                                    mc.master_seed);

    struct BlockSums {
        double sum = 0.0;
        double sum_sq = 0.0;
        std::uint64_t censored = 0;
    };
    const std::size_t n_blocks =
        static_cast<std::size_t>((mc.m + kBlockSize - 1) / kBlockSize);
    std::vector<BlockSums> blocks(n_blocks);
    run_farm(job, mc.m, mc.worker_hint,
             [&](std::size_t b, const PathResult* r, std::size_t n) {
                 CompensatedSum sum;
                 CompensatedSum sum_sq;
                 std::uint64_t censored = 0;
                 for (std::size_t i = 0; i < n; ++i) {
                     sum.add(r[i].time);
                     sum_sq.add(r[i].time * r[i].time);
                     censored += r[i].status == PathStatus::censored ? 1 : 0;
                 }
                 blocks[b] = BlockSums{sum.value(), sum_sq.value(), censored};
             });

    CompensatedSum sum;
    CompensatedSum sum_sq;
    std::uint64_t censored = 0;
    for (const auto& b : blocks) {
        sum.add(b.sum);
        sum_sq.add(b.sum_sq);
        censored += b.censored;
    }

    const double m_d = static_cast<double>(mc.m);
    const double mean = sum.value() / m_d;
    double variance = 0.0;
    if (mc.m > 1) {
        variance = std::max(0.0, (sum_sq.value() - m_d * mean * mean) / (m_d - 1.0));
    }
    const double se = std::sqrt(variance / m_d);
    return ExitTimeEstimate{mean,
                            se,
                            std::max(0.0, mean - kZ99 * se),
                            mean + kZ99 * se,
                            static_cast<double>(censored) / m_d,
                            mc.m};
}

std::uint64_t sweep_row_seed(std::uint64_t master_seed, std::size_t row_index) {
    return rng_detail::mix64(master_seed ^
                             (0xC2B2AE3D27D4EB4FULL * (static_cast<std::uint64_t>(row_index) + 1)));
}

std::vector<SweepRow> sweep_delta(const CevParams& params, double beta, double t,
                                  std::vector<double> deltas, const McConfig& mc,
                                  std::optional<double> exact, bool threshold_zero) {
    std::stable_sort(deltas.begin(), deltas.end(), std::greater<double>());
    std::vector<SweepRow> rows;
    rows.reserve(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double delta = deltas[i];
        SweepRow row{delta, 0.0, std::nullopt, {}};
        try {
            SchemeConfig scheme = make_scheme(delta, beta, t);
            if (threshold_zero) scheme.threshold = 0.0;
            row.threshold = scheme.threshold;
            McConfig row_mc = mc;
            row_mc.master_seed = sweep_row_seed(mc.master_seed, i);
            row.estimate = estimate_absorption(params, scheme, t, row_mc, exact);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cevsim
