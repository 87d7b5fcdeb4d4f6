#pragma once

#include <cmath>
#include <limits>

namespace cevsim {

/// A time value in [0, +inf]. Hitting times of paths that never reach the
/// level take the value +inf, which is a regular point of the metric rho.
struct ExtendedTime {
    double value = 0.0;

    static ExtendedTime infinite() {
        return ExtendedTime{std::numeric_limits<double>::infinity()};
    }
    static ExtendedTime finite(double t) { return ExtendedTime{t}; }

    bool is_infinite() const { return std::isinf(value); }

    friend bool operator==(ExtendedTime a, ExtendedTime b) { return a.value == b.value; }
    friend bool operator<(ExtendedTime a, ExtendedTime b) { return a.value < b.value; }
};

/// Metric on [0, +inf]: rho(s, t) = |arctan(s) - arctan(t)|, arctan(inf) = pi/2.
inline double rho(ExtendedTime s, ExtendedTime t) {
    return std::fabs(std::atan(s.value) - std::atan(t.value));
}

}  // namespace cevsim
