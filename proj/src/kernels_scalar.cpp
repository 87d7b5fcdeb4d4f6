#include "cevsim/kernels.hpp"

#include "cevsim/rng.hpp"

namespace cevsim {

// Reference kernel: one trajectory at a time through the generic path
// driver. All other kernels are equivalence-tested against this one.
void run_batch_scalar(const SimJob& job, std::uint64_t first_trajectory, std::size_t count,
                      PathResult* out) {
    for (std::size_t i = 0; i < count; ++i) {
        NormalStream stream(job.master_seed, first_trajectory + i);
        out[i] = run_path(job.x0, job.coeffs, job.stop, stream);
    }
}

}  // namespace cevsim
