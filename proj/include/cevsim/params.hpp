#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace cevsim {

/// Invalid model or scheme configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Coefficients of the SDE dX = mu*X dt + sigma*X^p dB, started from x0 > 0.
/// The boundary {0} is absorbing for p in [1/2, 1).
struct CevParams {
    double mu = 0.0;
    double sigma = 1.0;
    double p = 0.5;
    double x0 = 1.0;

    void validate() const;
};

/// Upper endpoint of the admissible mollification range, (1/2)/(1-p).
inline double beta_upper_limit(double p) { return 0.5 / (1.0 - p); }

/// Default mollification exponent: 90% of the admissible upper limit.
inline double default_beta(double p) { return 0.9 * beta_upper_limit(p); }

/// Accepts beta iff 0 < beta < (1/2)/(1-p); both endpoints rejected.
void validate_beta(double p, double beta);

/// Grid step delta, mollification exponent beta, horizon t_max and the
/// derived stopping level threshold = delta^beta.
struct SchemeConfig {
    double delta;
    double beta;
    double t_max;
    double threshold;
};

/// Builds a SchemeConfig, deriving threshold = delta^beta.
/// beta admissibility is checked against CevParams at the point of use,
/// since it depends on p.
SchemeConfig make_scheme(double delta, double beta, double t_max);

}  // namespace cevsim
