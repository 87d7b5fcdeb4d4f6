#include "cevsim/rng.hpp"

namespace cevsim::rng_detail {

std::uint64_t g_counter_increment = kGolden;

}  // namespace cevsim::rng_detail
