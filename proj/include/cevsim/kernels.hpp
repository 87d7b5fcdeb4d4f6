#pragma once

#include <cstddef>
#include <cstdint>

#include "cevsim/engine.hpp"

namespace cevsim {

/// Everything a batch kernel needs to run a contiguous block of
/// trajectories: one job is shared by all workers of an estimator call.
struct SimJob {
    double x0;
    EmCoefficients coeffs;
    StopSpec stop;
    std::uint64_t master_seed;
    std::uint64_t n_steps;

    static SimJob make(const CevParams& params, double delta, const StopSpec& stop,
                       std::uint64_t master_seed) {
        return SimJob{params.x0, EmCoefficients::make(params, delta), stop, master_seed,
                      step_count_for_horizon(stop.t_stop, delta)};
    }
};

/// Runs trajectories [first, first + count) of the job and writes one
/// PathResult per trajectory. All kernels are bit-for-bit equivalent; the
/// selection is purely a throughput choice.
using BatchFn = void (*)(const SimJob& job, std::uint64_t first_trajectory,
                         std::size_t count, PathResult* out);

enum class KernelKind { scalar, avx2 };

const char* kernel_name(KernelKind kind);

/// True when the kernel is both compiled in and supported by this CPU.
bool kernel_available(KernelKind kind);

/// Best available kernel, overridable with CEVSIM_KERNEL=scalar|avx2.
KernelKind select_kernel();

BatchFn kernel_fn(KernelKind kind);

void run_batch_scalar(const SimJob& job, std::uint64_t first_trajectory, std::size_t count,
                      PathResult* out);
void run_batch_avx2(const SimJob& job, std::uint64_t first_trajectory, std::size_t count,
                    PathResult* out);

}  // namespace cevsim
