#include "cevsim/quadrature.hpp"

namespace cevsim::quad_detail {

namespace {

// Legendre P_n and its derivative at x, by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double deriv = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, deriv};
}

GaussRule build_gl12() {
    constexpr int n = 12;
    GaussRule rule{};
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 64; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const auto [p, dp] = legendre(n, x);
        (void)p;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.node[i] = -x;
        rule.node[n - 1 - i] = x;
        rule.weight[i] = w;
        rule.weight[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gl12() {
    static const GaussRule rule = build_gl12();
    return rule;
}

}  // namespace cevsim::quad_detail
