#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace cevsim {

/// True iff the closed segment between x_prev and x_next contains `level`,
/// excluding the case where only the old endpoint equals the level (that
/// touch belongs to the previous segment).
inline bool segment_brackets(double x_prev, double x_next, double level) {
    const double lo = x_prev < x_next ? x_prev : x_next;
    const double hi = x_prev < x_next ? x_next : x_prev;
    if (level < lo || level > hi) return false;
    if (level == x_prev && level != x_next) return false;
    return true;
}

/// Crossing time of `level` by the linear interpolant through
/// (t_prev, x_prev) and (t_prev + delta, x_next). Returns the first time the
/// segment equals the level: t_prev when x_prev == level, the interpolated
/// point when the endpoint values straddle the level or x_next == level,
/// and nothing otherwise.
inline std::optional<double> interpolate_crossing_time(double t_prev, double x_prev,
                                                       double x_next, double level,
                                                       double delta) {
    if (x_prev == level) return t_prev;
    const double dp = x_prev - level;
    const double dn = x_next - level;
    if (dn == 0.0 || (dp > 0.0) != (dn > 0.0)) {
        return t_prev + delta * (dp / (x_prev - x_next));
    }
    return std::nullopt;
}

/// Smallest j >= 1 such that the segment (values[j-1], values[j]) brackets
/// `level`; nothing when no segment does (inf of the empty set).
inline std::optional<std::size_t> grid_crossing_index(std::span<const double> values,
                                                      double level) {
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (segment_brackets(values[j - 1], values[j], level)) return j;
    }
    return std::nullopt;
}

}  // namespace cevsim
