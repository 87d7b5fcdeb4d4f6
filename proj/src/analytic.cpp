#include "cevsim/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace cevsim {

double absorption_cdf_half(double mu, double sigma, double x, double t) {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    if (!(t > 0.0)) throw ConfigError("t must be positive");
    double rate;
    if (mu == 0.0) {
        rate = 1.0 / t;
    } else if (std::fabs(mu * t) < 1e-8) {
        // mu e^{mu t}/(e^{mu t}-1) = (1/t) u/(1-e^{-u}) with u = mu t -> 0.
        const double u = mu * t;
        rate = (1.0 / t) * (1.0 + 0.5 * u + u * u / 12.0);
    } else {
        rate = mu / (-std::expm1(-mu * t));
    }
    return std::exp(-(2.0 * x / (sigma * sigma)) * rate);
}

double absorption_atom(double mu, double sigma, double x) {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    return std::min(1.0, std::exp(-2.0 * x * mu / (sigma * sigma)));
}

DiffusionFunctions::DiffusionFunctions(const CevParams& params, QuadratureConfig quad)
    : params_(params), quad_(quad) {
    params_.validate();
    quad_.validate();
    scale_total_quad_ = scale_integral_graded(0.0, 1.0);
    scale_total_ = has_closed_form() ? scale_measure(0.0, 1.0, ScaleRoute::closed_form)
                                     : scale_total_quad_;
}

double DiffusionFunctions::scale_density(double y) const {
    if (!(y >= 0.0)) throw ConfigError("scale density requires y >= 0");
    if (y == 0.0) return 1.0;
    const double a = 2.0 - 2.0 * params_.p;
    const double c = 2.0 * params_.mu / (params_.sigma * params_.sigma);
    return std::exp(-c * std::pow(y, a) / a);
}

double DiffusionFunctions::scale_integral_graded(double a, double b) const {
    return integrate_graded_left([this](double z) { return scale_density(z); }, a, b,
                                 quad_.graded_levels);
}

double DiffusionFunctions::scale_measure(double x, double y, ScaleRoute route) const {
    if (!(x >= 0.0) || !(y >= x)) throw ConfigError("scale measure requires 0 <= x <= y");
    switch (route) {
        case ScaleRoute::automatic:
            if (has_closed_form()) return scale_measure(x, y, ScaleRoute::closed_form);
            return scale_integral_graded(x, y);
        case ScaleRoute::closed_form: {
            if (params_.mu == 0.0) return y - x;  // s == 1
            if (params_.p == 0.5) {
                const double c = 2.0 * params_.mu / (params_.sigma * params_.sigma);
                return (std::exp(-c * x) - std::exp(-c * y)) / c;
            }
            throw ConfigError("no closed-form scale measure for p != 1/2 with mu != 0");
        }
        case ScaleRoute::quadrature:
            return integrate_adaptive([this](double z) { return scale_density(z); }, x, y,
                                      quad_.rel_tol);
    }
    throw ConfigError("unknown scale route");
}

double DiffusionFunctions::speed_density(double y) const {
    if (!(y > 0.0)) throw ConfigError("speed density requires y > 0");
    const double two_p = 2.0 * params_.p;
    return 1.0 / (params_.sigma * params_.sigma * std::pow(y, two_p) * scale_density(y));
}

double DiffusionFunctions::scale_from_zero(double y) const {
    return scale_measure(0.0, y, ScaleRoute::automatic);
}

double DiffusionFunctions::phi(double x, ScaleRoute route) const {
    if (!(x >= 0.0) || !(x <= 1.0)) throw ConfigError("phi requires x in [0, 1]");
    switch (route) {
        case ScaleRoute::automatic:
            if (has_closed_form()) return phi(x, ScaleRoute::closed_form);
            return phi(x, ScaleRoute::quadrature);
        case ScaleRoute::closed_form: {
            if (params_.mu == 0.0) return x;
            if (params_.p == 0.5) {
                const double c = 2.0 * params_.mu / (params_.sigma * params_.sigma);
                return std::expm1(-c * x) / std::expm1(-c);
            }
            throw ConfigError("no closed-form phi for p != 1/2 with mu != 0");
        }
        case ScaleRoute::quadrature:
            return scale_integral_graded(0.0, x) / scale_total_quad_;
    }
    throw ConfigError("unknown scale route");
}

double DiffusionFunctions::exit_integral_upper(double x) const {
    // int_x^1 (S(1) - S(y)) m(y) dy; steepest near y = x when x is small.
    return integrate_graded_left(
        [this](double y) { return (scale_total_ - scale_from_zero(y)) * speed_density(y); },
        x, 1.0, quad_.graded_levels);
}

double DiffusionFunctions::exit_integral_lower(double x) const {
    // int_0^x (S(y) - S(0)) m(y) dy; integrand ~ y^{1-2p} near 0.
    return integrate_graded_left(
        [this](double y) { return scale_from_zero(y) * speed_density(y); }, 0.0, x,
        quad_.graded_levels);
}

double DiffusionFunctions::psi(double x) const {
    if (!(x >= 0.0) || !(x <= 1.0)) throw ConfigError("psi requires x in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    const double ph = phi(x);
    return 2.0 * ph * exit_integral_upper(x) + 2.0 * (1.0 - ph) * exit_integral_lower(x);
}

DiffusionFunctions::Derivatives DiffusionFunctions::phi_derivatives(double x) const {
    if (!(x > 0.0) || !(x < 1.0)) throw ConfigError("phi derivatives require x in (0, 1)");
    const double mu = params_.mu;
    const double sig2 = params_.sigma * params_.sigma;
    const double p = params_.p;
    const double d1 = scale_density(x) / scale_total_;
    const double d2 = -(2.0 * mu / sig2) * std::pow(x, 1.0 - 2.0 * p) * d1;
    const double d3 = -2.0 * (mu * d1 + (mu * x + sig2 * p * std::pow(x, 2.0 * p - 1.0)) * d2) /
                      (sig2 * std::pow(x, 2.0 * p));
    return Derivatives{d1, d2, d3};
}

DiffusionFunctions::Derivatives DiffusionFunctions::psi_derivatives(double x) const {
    if (!(x > 0.0) || !(x < 1.0)) throw ConfigError("psi derivatives require x in (0, 1)");
    const double mu = params_.mu;
    const double sig2 = params_.sigma * params_.sigma;
    const double p = params_.p;
    const double ph = phi(x);
    const double dph = scale_density(x) / scale_total_;
    const double m_x = speed_density(x);
    const double s_x0 = scale_from_zero(x);
    const double d1 = 2.0 * (dph * exit_integral_upper(x) - ph * (scale_total_ - s_x0) * m_x -
                             dph * exit_integral_lower(x) + (1.0 - ph) * s_x0 * m_x);
    const double d2 = -2.0 * (1.0 + mu * x * d1) / (sig2 * std::pow(x, 2.0 * p));
    const double d3 = -2.0 * (mu * d1 + (mu * x + sig2 * p * std::pow(x, 2.0 * p - 1.0)) * d2) /
                      (sig2 * std::pow(x, 2.0 * p));
    return Derivatives{d1, d2, d3};
}

double generator_apply(const std::function<double(double)>& f, double x,
                       const CevParams& params) {
    if (!(x > 0.0)) throw ConfigError("generator requires x > 0");
    const double h = std::max(1e-6, 1e-4 * x);
    const double f_plus = f(x + h);
    const double f_minus = f(x - h);
    const double f_mid = f(x);
    const double d1 = (f_plus - f_minus) / (2.0 * h);
    const double d2 = (f_plus - 2.0 * f_mid + f_minus) / (h * h);
    return generator_apply(d1, d2, x, params);
}

double generator_apply(double f_prime, double f_second, double x, const CevParams& params) {
    const double sig2 = params.sigma * params.sigma;
    return params.mu * x * f_prime + 0.5 * sig2 * std::pow(x, 2.0 * params.p) * f_second;
}

bool DerivativeScanReport::Quantity::tail_bounded(double factor) const {
    const double floor = 1e-12 * (1.0 + sup);
    if (tail_max <= floor) return true;
    return tail_max <= factor * std::max(tail_min, floor);
}

DerivativeScanReport derivative_bound_scan(const DiffusionFunctions& df, ScanTarget target) {
    const double p = df.params().p;
    const double two_p = 2.0 * p;
    DerivativeScanReport report;
    auto& q = report.quantities;
    if (target == ScanTarget::phi) {
        q[0].name = "|phi'|";
        q[1].name = "x^(2p-1) |phi''|";
        q[2].name = "x^(2p) |phi'''|";
    } else if (p == 0.5) {
        q[0].name = "|psi'| / max(log(1/x), 1)";
        q[1].name = "x^(2p) |psi''|";
        q[2].name = "x^(2p+1) |psi'''|";
    } else {
        q[0].name = "x^(2p-1) |psi'|";
        q[1].name = "x^(2p) |psi''|";
        q[2].name = "x^(2p+1) |psi'''|";
    }

    for (int k = 1; k <= 20; ++k) {
        const double x = std::ldexp(1.0, -k);
        const auto d = target == ScanTarget::phi ? df.phi_derivatives(x) : df.psi_derivatives(x);
        double w1;
        if (target == ScanTarget::phi) {
            w1 = std::fabs(d.first);
        } else if (p == 0.5) {
            w1 = std::fabs(d.first) / std::max(std::log(1.0 / x), 1.0);
        } else {
            w1 = std::pow(x, two_p - 1.0) * std::fabs(d.first);
        }
        const double shift = target == ScanTarget::phi ? 0.0 : 1.0;
        q[0].values[k - 1] = w1;
        q[1].values[k - 1] = std::pow(x, two_p - 1.0 + shift) * std::fabs(d.second);
        q[2].values[k - 1] = std::pow(x, two_p + shift) * std::fabs(d.third);
    }

    for (auto& quantity : q) {
        quantity.sup = *std::max_element(quantity.values.begin(), quantity.values.end());
        quantity.tail_max = *std::max_element(quantity.values.begin() + 9, quantity.values.end());
        quantity.tail_min = *std::min_element(quantity.values.begin() + 9, quantity.values.end());
    }
    return report;
}

}  // namespace cevsim
