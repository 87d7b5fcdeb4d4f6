#pragma once

#include <cmath>
#include <cstdint>

namespace cevsim {

// Counter-based normal generator. Every draw is a pure function of
// (master_seed, trajectory_index, draw_index), so trajectories can be
// simulated in any order, on any number of workers, with identical output.
//
// Scheme (all arithmetic mod 2^64):
//   mix64(z): SplitMix64 finalizer
//     z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//     z ^= z >> 27;  z *= 0x94D049BB133111EB
//     z ^= z >> 31
//   stream_id(seed, traj) = mix64((seed + 0x9E3779B97F4A7C15)
//                                 ^ (traj * 0xD1342543DE82EF95 + 0x2545F4914F6CDD1D))
//   raw_u64(seed, traj, c) = mix64(stream_id + (c + 1) * 0x9E3779B97F4A7C15)
//   normal draw k, pair m = k >> 1:
//     ra = raw_u64(seed, traj, 2m),  rb = raw_u64(seed, traj, 2m + 1)
//     u1 = ((ra >> 12) | 1) * 2^-52      in (0, 1)
//     u2 =  (rb >> 12)      * 2^-52      in [0, 1)
//     r = sqrt(-2 ln u1),  theta = 2 pi u2
//     draw 2m = r cos(theta),  draw 2m + 1 = r sin(theta)

namespace rng_detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kStreamMul = 0xD1342543DE82EF95ULL;
inline constexpr std::uint64_t kStreamAdd = 0x2545F4914F6CDD1DULL;

// Counter increment used when advancing within a stream. Equals kGolden; it
// is a mutable global only so the selftest can demonstrate, as a negative
// control, that the determinism check catches a corrupted mixing constant.
extern std::uint64_t g_counter_increment;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace rng_detail

inline std::uint64_t stream_id(std::uint64_t master_seed, std::uint64_t trajectory) {
    using namespace rng_detail;
    return mix64((master_seed + kGolden) ^ (trajectory * kStreamMul + kStreamAdd));
}

inline std::uint64_t raw_u64(std::uint64_t sid, std::uint64_t counter) {
    using namespace rng_detail;
    return mix64(sid + (counter + 1) * g_counter_increment);
}

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double uniform_from_bits_open(std::uint64_t r) {
    return static_cast<double>((r >> 12) | 1ULL) * 0x1p-52;
}

inline double uniform_from_bits_halfopen(std::uint64_t r) {
    return static_cast<double>(r >> 12) * 0x1p-52;
}

/// Both components of the Box-Muller pair with index `pair_index`.
struct NormalPair {
    double even;
    double odd;
};

/// Box-Muller tail shared by every kernel, so the draw arithmetic cannot
/// drift between the scalar and SIMD paths.
inline NormalPair box_muller_from_bits(std::uint64_t ra, std::uint64_t rb) {
    const double u1 = uniform_from_bits_open(ra);
    const double u2 = uniform_from_bits_halfopen(rb);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = kTwoPi * u2;
    return NormalPair{r * std::cos(theta), r * std::sin(theta)};
}

inline NormalPair normal_pair(std::uint64_t sid, std::uint64_t pair_index) {
    return box_muller_from_bits(raw_u64(sid, 2 * pair_index),
                                raw_u64(sid, 2 * pair_index + 1));
}

/// The k-th N(0,1) draw of a stream; pure in (master_seed, trajectory, k).
inline double normal_at(std::uint64_t master_seed, std::uint64_t trajectory, std::uint64_t k) {
    const NormalPair pair = normal_pair(stream_id(master_seed, trajectory), k >> 1);
    return (k & 1ULL) ? pair.odd : pair.even;
}

/// Sequential view of one trajectory's draw stream. operator() returns the
/// next draw; draws_consumed() reports how many were taken.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t trajectory)
        : sid_(stream_id(master_seed, trajectory)) {}

    double operator()() {
        const std::uint64_t k = next_++;
        if ((k & 1ULL) == 0) {
            const NormalPair pair = normal_pair(sid_, k >> 1);
            cached_odd_ = pair.odd;
            return pair.even;
        }
        return cached_odd_;
    }

    std::uint64_t draws_consumed() const { return next_; }

private:
    std::uint64_t sid_;
    std::uint64_t next_ = 0;
    double cached_odd_ = 0.0;
};

}  // namespace cevsim
