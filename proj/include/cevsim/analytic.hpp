#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "cevsim/params.hpp"
#include "cevsim/quadrature.hpp"

namespace cevsim {

/// P_x(tau_0 <= t) for p = 1/2:
///   exp(-(2x/sigma^2) / t)                          when mu = 0,
///   exp(-(2x/sigma^2) * mu e^{mu t}/(e^{mu t} - 1)) when mu != 0,
/// with a series-stabilized branch for |mu t| below 1e-8.
double absorption_cdf_half(double mu, double sigma, double x, double t);

/// P_x(tau_0 < infinity) = min(1, exp(-2 x mu / sigma^2)); certain for mu <= 0.
double absorption_atom(double mu, double sigma, double x);

enum class ScaleRoute { automatic, closed_form, quadrature };

/// Scale density, scale measure, speed density and the boundary-value
/// functions phi (exit-at-1 probability) and psi (expected exit time of
/// (0,1)) of the CEV generator L f = mu x f' + (1/2) sigma^2 x^{2p} f''.
/// Pure and read-only after construction.
class DiffusionFunctions {
public:
    explicit DiffusionFunctions(const CevParams& params, QuadratureConfig quad = {});

    /// s(y) = exp(-(2 mu / sigma^2) y^{2-2p} / (2-2p)); s(0) = 1.
    double scale_density(double y) const;

    /// S(y) - S(x) = integral of s over [x, y]. The closed form exists for
    /// mu = 0 (identity) and p = 1/2 (exponential); the quadrature route is
    /// adaptive and kept available for cross-checking in all cases.
    double scale_measure(double x, double y, ScaleRoute route = ScaleRoute::automatic) const;

    /// m(y) = 1 / (sigma^2 y^{2p} s(y)), y > 0.
    double speed_density(double y) const;

    /// phi(x) = (S(x) - S(0)) / (S(1) - S(0)) on [0, 1].
    double phi(double x, ScaleRoute route = ScaleRoute::automatic) const;

    /// psi(x) = 2 phi(x) int_x^1 (S(1)-S(y)) m(y) dy
    ///        + 2 (1-phi(x)) int_0^x (S(y)-S(0)) m(y) dy on [0, 1].
    /// The y^{1-2p} singularity of the second integrand at 0 is absorbed by
    /// the graded panels.
    double psi(double x) const;

    struct Derivatives {
        double first;
        double second;
        double third;
    };

    /// Analytic derivatives: phi' from the scale density, higher orders by
    /// differentiating L phi = 0.
    Derivatives phi_derivatives(double x) const;

    /// psi' by Leibniz differentiation of the exit-time integrals, higher
    /// orders by differentiating L psi = -1.
    Derivatives psi_derivatives(double x) const;

    const CevParams& params() const { return params_; }
    const QuadratureConfig& quadrature_config() const { return quad_; }
    bool has_closed_form() const { return params_.mu == 0.0 || params_.p == 0.5; }

private:
    double scale_integral_graded(double a, double b) const;
    double scale_from_zero(double y) const;  // S(y) - S(0), automatic route
    double exit_integral_upper(double x) const;
    double exit_integral_lower(double x) const;

    CevParams params_;
    QuadratureConfig quad_;
    double scale_total_;  // S(1) - S(0), automatic route
    double scale_total_quad_;
};

/// (L f)(x) = mu x f'(x) + (1/2) sigma^2 x^{2p} f''(x), derivatives by
/// central differences with step h = max(1e-6, 1e-4 x).
double generator_apply(const std::function<double(double)>& f, double x,
                       const CevParams& params);

/// Same, with caller-supplied derivatives.
double generator_apply(double f_prime, double f_second, double x, const CevParams& params);

/// Weighted derivative magnitudes of phi or psi on the geometric grid
/// x = 2^-k, k = 1..20, as finite proxies for the Appendix-style
/// sup bounds. The tail is k >= 10.
struct DerivativeScanReport {
    struct Quantity {
        std::string name;
        std::array<double, 20> values;
        double sup;
        double tail_max;
        double tail_min;

        /// True when the tail does not grow beyond `factor` over its minimum
        /// (quantities that vanish identically pass trivially).
        bool tail_bounded(double factor = 10.0) const;
    };
    std::array<Quantity, 3> quantities;
};

enum class ScanTarget { phi, psi };

DerivativeScanReport derivative_bound_scan(const DiffusionFunctions& df, ScanTarget target);

}  // namespace cevsim
