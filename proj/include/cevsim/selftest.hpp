#pragma once

#include <ostream>

namespace cevsim {

/// Fast invariant suite behind the `selftest` subcommand: analytic
/// residuals, RNG moments, determinism, kernel equivalence and metric
/// properties. Prints one status line per check; returns true iff all pass.
/// Setting CEVSIM_SELFTEST_MUTATE demonstrates the negative control: the
/// determinism check reruns with a corrupted stream-mixing constant and is
/// expected to fail.
bool run_selftest(std::ostream& out);

}  // namespace cevsim
