// AVX2 batch kernel: four trajectories per register with lane refill.
// A lane that stops (crossing or horizon) immediately picks up the next
// trajectory of the block, so occupancy stays near 100% and no draws are
// computed for finished paths. Produces bit-identical results to the
// scalar kernel; two rules make that possible:
//   - every double operation mirrors the scalar expression tree exactly
//     (add/mul/sqrt/compare are correctly rounded per lane, and FMA
//     contraction is disabled project-wide), and
//   - the Box-Muller tail and pow() go through the same scalar libm calls
//     as the reference kernel, one lane at a time.
// The vector payoff is the stream hashing and the recursion arithmetic;
// lanes carry independent step counters, so draw parity, horizon and
// crossing bookkeeping are all per lane.

#include "cevsim/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "cevsim/rng.hpp"

namespace cevsim {
namespace {

constexpr int kLanes = 4;

inline __m256i mullo64(__m256i a, __m256i b) {
    // 64x64 -> low 64 multiply out of 32-bit pieces (no vpmullq below AVX-512).
    const __m256i a_hi = _mm256_srli_epi64(a, 32);
    const __m256i b_hi = _mm256_srli_epi64(b, 32);
    const __m256i lo_lo = _mm256_mul_epu32(a, b);
    const __m256i hi_lo = _mm256_mul_epu32(a_hi, b);
    const __m256i lo_hi = _mm256_mul_epu32(a, b_hi);
    const __m256i cross = _mm256_add_epi64(hi_lo, lo_hi);
    return _mm256_add_epi64(lo_lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64_v(__m256i z) {
    const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ULL));
    const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBULL));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
    z = mullo64(z, c1);
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
    z = mullo64(z, c2);
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
    return z;
}

inline __m256i mask_from_bits(int bits) {
    alignas(32) std::uint64_t words[kLanes];
    for (int l = 0; l < kLanes; ++l) words[l] = (bits & (1 << l)) ? ~0ULL : 0ULL;
    return _mm256_load_si256(reinterpret_cast<const __m256i*>(words));
}

}  // namespace

void run_batch_avx2(const SimJob& job, std::uint64_t first_trajectory, std::size_t count,
                    PathResult* out) {
    const EmCoefficients& c = job.coeffs;
    const StopSpec& stop = job.stop;

    // Degenerate start: identical outcome for every trajectory.
    if (job.x0 <= stop.lower || job.x0 >= stop.upper) {
        const PathStatus status =
            job.x0 <= stop.lower ? PathStatus::hit_lower : PathStatus::hit_upper;
        for (std::size_t i = 0; i < count; ++i) out[i] = PathResult{status, 0.0, 0, job.x0};
        return;
    }

    const __m256d mu_v = _mm256_set1_pd(c.mu);
    const __m256d sigma_v = _mm256_set1_pd(c.sigma);
    const __m256d delta_v = _mm256_set1_pd(c.delta);
    const __m256d sqrt_delta_v = _mm256_set1_pd(c.sqrt_delta);
    const __m256d lower_v = _mm256_set1_pd(stop.lower);
    const __m256d upper_v = _mm256_set1_pd(stop.upper);
    const __m256d zero_v = _mm256_setzero_pd();
    const __m256i inc_v =
        _mm256_set1_epi64x(static_cast<long long>(rng_detail::g_counter_increment));
    const __m256i one64 = _mm256_set1_epi64x(1);
    const __m256i two64 = _mm256_set1_epi64x(2);
    const __m256i even_mask64 = _mm256_set1_epi64x(static_cast<long long>(~1ULL));
    const __m256i n_steps_v = _mm256_set1_epi64x(static_cast<long long>(job.n_steps));

    // Lane state. x and k live in registers on the fast path and are
    // spilled only when a lane finishes; sid, the odd-draw cache and the
    // trajectory ids are kept in arrays.
    alignas(32) std::uint64_t sid_s[kLanes] = {0, 0, 0, 0};
    alignas(32) double cache_s[kLanes] = {0.0, 0.0, 0.0, 0.0};
    std::uint64_t traj_s[kLanes] = {0, 0, 0, 0};
    int active = 0;

    std::uint64_t next_traj = first_trajectory;
    const std::uint64_t end_traj = first_trajectory + count;
    for (int l = 0; l < kLanes && next_traj < end_traj; ++l, ++next_traj) {
        traj_s[l] = next_traj;
        sid_s[l] = stream_id(job.master_seed, next_traj);
        active |= 1 << l;
    }

    __m256i sid_v = _mm256_load_si256(reinterpret_cast<const __m256i*>(sid_s));
    __m256i k_v = _mm256_setzero_si256();
    __m256d x_v = _mm256_set1_pd(job.x0);
    __m256d active_d = _mm256_castsi256_pd(mask_from_bits(active));

    while (active != 0) {
        // Fresh Box-Muller pairs for lanes whose draw index is even; the
        // stream hashing is vectorized, the transcendental tail is the
        // shared scalar helper.
        const int parity_even =
            _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(
                _mm256_and_si256(k_v, one64), _mm256_setzero_si256()))) &
            active;
        alignas(32) double z_s[kLanes];
        if (parity_even != 0) {
            const __m256i k_even = _mm256_and_si256(k_v, even_mask64);
            const __m256i ra_v = mix64_v(_mm256_add_epi64(
                sid_v, mullo64(_mm256_add_epi64(k_even, one64), inc_v)));
            const __m256i rb_v = mix64_v(_mm256_add_epi64(
                sid_v, mullo64(_mm256_add_epi64(k_even, two64), inc_v)));
            alignas(32) std::uint64_t ra_s[kLanes];
            alignas(32) std::uint64_t rb_s[kLanes];
            _mm256_store_si256(reinterpret_cast<__m256i*>(ra_s), ra_v);
            _mm256_store_si256(reinterpret_cast<__m256i*>(rb_s), rb_v);
            for (int l = 0; l < kLanes; ++l) {
                if ((parity_even & (1 << l)) != 0) {
                    const NormalPair pair = box_muller_from_bits(ra_s[l], rb_s[l]);
                    z_s[l] = pair.even;
                    cache_s[l] = pair.odd;
                } else {
                    z_s[l] = cache_s[l];
                }
            }
        } else {
            for (int l = 0; l < kLanes; ++l) z_s[l] = cache_s[l];
        }
        const __m256d z_v = _mm256_load_pd(z_s);

        // Same expression tree as the scalar em_step.
        const __m256d xp = _mm256_and_pd(x_v, _mm256_cmp_pd(x_v, zero_v, _CMP_GT_OQ));
        __m256d xp_pow;
        if (c.p_is_half) {
            xp_pow = _mm256_sqrt_pd(xp);
        } else {
            alignas(32) double xps[kLanes];
            alignas(32) double pows[kLanes];
            _mm256_store_pd(xps, xp);
            for (int l = 0; l < kLanes; ++l) {
                pows[l] = (active & (1 << l)) ? std::pow(xps[l], c.p) : 0.0;
            }
            xp_pow = _mm256_load_pd(pows);
        }
        const __m256d drift = _mm256_mul_pd(_mm256_mul_pd(mu_v, xp), delta_v);
        const __m256d diff = _mm256_mul_pd(
            _mm256_mul_pd(_mm256_mul_pd(sigma_v, xp_pow), z_v), sqrt_delta_v);
        const __m256d x_next_v = _mm256_add_pd(_mm256_add_pd(x_v, drift), diff);

        const __m256d lo_mask = _mm256_cmp_pd(x_next_v, lower_v, _CMP_LE_OQ);
        const __m256d hi_mask = _mm256_cmp_pd(x_next_v, upper_v, _CMP_GE_OQ);
        const int crossed = _mm256_movemask_pd(_mm256_or_pd(lo_mask, hi_mask)) & active;
        const __m256i k_next_v = _mm256_add_epi64(k_v, one64);
        const int at_horizon =
            _mm256_movemask_pd(
                _mm256_castsi256_pd(_mm256_cmpeq_epi64(k_next_v, n_steps_v))) &
            active;
        const int finishing = crossed | at_horizon;

        if (finishing == 0) {
            // Fast path: step every active lane.
            x_v = _mm256_blendv_pd(x_v, x_next_v, active_d);
            k_v = _mm256_add_epi64(k_v, _mm256_and_si256(one64, _mm256_castpd_si256(active_d)));
            continue;
        }

        // Slow path: spill, finalize finished lanes, refill, reload.
        alignas(32) double x_prev_s[kLanes];
        alignas(32) double x_next_s[kLanes];
        alignas(32) std::uint64_t k_next_s[kLanes];
        _mm256_store_pd(x_prev_s, x_v);
        _mm256_store_pd(x_next_s, x_next_v);
        _mm256_store_si256(reinterpret_cast<__m256i*>(k_next_s), k_next_v);
        const int lo_bits = _mm256_movemask_pd(lo_mask);

        for (int l = 0; l < kLanes; ++l) {
            if ((active & (1 << l)) == 0) continue;
            const std::uint64_t j = k_next_s[l];
            if ((finishing & (1 << l)) != 0) {
                PathResult result;
                if ((crossed & (1 << l)) != 0) {
                    const bool is_lower = (lo_bits & (1 << l)) != 0;
                    const double level = is_lower ? stop.lower : stop.upper;
                    const double t_prev = static_cast<double>(j - 1) * c.delta;
                    const double tau = crossing_time_on_segment(t_prev, x_prev_s[l],
                                                                x_next_s[l], level, c.delta);
                    if (tau <= stop.t_stop) {
                        result = PathResult{
                            is_lower ? PathStatus::hit_lower : PathStatus::hit_upper, tau, j,
                            x_next_s[l]};
                    } else {
                        result = PathResult{PathStatus::censored, stop.t_stop, j, x_next_s[l]};
                    }
                } else {
                    result = PathResult{PathStatus::censored, stop.t_stop, j, x_next_s[l]};
                }
                out[traj_s[l] - first_trajectory] = result;

                if (next_traj < end_traj) {
                    traj_s[l] = next_traj;
                    sid_s[l] = stream_id(job.master_seed, next_traj);
                    ++next_traj;
                    k_next_s[l] = 0;
                    x_next_s[l] = job.x0;
                    cache_s[l] = 0.0;
                } else {
                    active &= ~(1 << l);
                }
            }
        }

        sid_v = _mm256_load_si256(reinterpret_cast<const __m256i*>(sid_s));
        k_v = _mm256_load_si256(reinterpret_cast<const __m256i*>(k_next_s));
        x_v = _mm256_load_pd(x_next_s);
        active_d = _mm256_castsi256_pd(mask_from_bits(active));
    }
}

}  // namespace cevsim

#else  // !__AVX2__

namespace cevsim {

void run_batch_avx2(const SimJob& job, std::uint64_t first_trajectory, std::size_t count,
                    PathResult* out) {
    run_batch_scalar(job, first_trajectory, count, out);
}

}  // namespace cevsim

#endif
