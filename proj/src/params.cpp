#include "cevsim/params.hpp"

#include <cmath>
#include <sstream>

namespace cevsim {

void CevParams::validate() const {
    if (!(std::isfinite(mu))) {
        throw ConfigError("mu must be finite");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("sigma must be positive (got " + std::to_string(sigma) + ")");
    }
    if (!(p >= 0.5) || !(p < 1.0)) {
        throw ConfigError("p must lie in [0.5, 1) (got " + std::to_string(p) + ")");
    }
    if (!(x0 > 0.0) || !std::isfinite(x0)) {
        throw ConfigError("x0 must be positive (got " + std::to_string(x0) + ")");
    }
}

void validate_beta(double p, double beta) {
    if (!(p >= 0.5) || !(p < 1.0)) {
        throw ConfigError("p must lie in [0.5, 1) (got " + std::to_string(p) + ")");
    }
    const double upper = beta_upper_limit(p);
    if (!(beta > 0.0) || !(beta < upper)) {
        std::ostringstream msg;
        msg << "beta must lie in the open interval (0, " << upper << ") for p = " << p
            << " (got " << beta << ")";
        throw ConfigError(msg.str());
    }
}

SchemeConfig make_scheme(double delta, double beta, double t_max) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ConfigError("delta must be positive (got " + std::to_string(delta) + ")");
    }
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw ConfigError("t_max must be positive (got " + std::to_string(t_max) + ")");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ConfigError("beta must be positive (got " + std::to_string(beta) + ")");
    }
    return SchemeConfig{delta, beta, t_max, std::pow(delta, beta)};
}

}  // namespace cevsim
