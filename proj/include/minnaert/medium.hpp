#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "minnaert/error.hpp"

namespace minnaert {

/// Non-dimensional bubble/host parameters: density contrast delta, shear mu,
/// compression lambda, and velocity ratio tau.
struct Medium {
    double delta = 1e-3;
    double mu = 1e-3;
    double lambda = 1.0;
    double tau = 1.0;

    /// Medium with mu = delta = t and lambda = tau = 1.
    static Medium table(double t) { return {t, t, 1.0, 1.0}; }

    double cp2() const { return lambda + 2.0 * mu; }
    double cp() const { return std::sqrt(cp2()); }
    std::complex<double> k_p(std::complex<double> k) const { return k * tau / cp(); }
    std::complex<double> k_s(std::complex<double> k) const {
        if (!(mu > 0.0)) throw ConfigError("shear wavenumber undefined for mu = 0");
        return k * tau / std::sqrt(mu);
    }

    void validate() const {
        if (!std::isfinite(delta) || !std::isfinite(mu) || !std::isfinite(lambda) || !std::isfinite(tau))
            throw ConfigError("medium parameters must be finite");
        if (!(delta > 0.0)) throw ConfigError("delta must be positive");
        if (mu < 0.0) throw ConfigError("mu must be non-negative");
        if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
        if (!(tau > 0.0)) throw ConfigError("tau must be positive");
        if (!(cp2() > 0.0)) throw ConfigError("lambda + 2 mu must be positive");
    }

    /// Parameters outside the small-contrast, soft-host regime.
    std::vector<std::string> regime_warnings() const {
        std::vector<std::string> w;
        if (delta > 0.1) w.push_back("delta is not small");
        if (mu > 0.1) w.push_back("mu is not small");
        return w;
    }
};

/// Physical parameters: bubble and host densities, bulk modulus of the gas,
/// Lame constants of the host, and the bubble length scale.
struct DimensionalMedium {
    double rho_b = 1.0;
    double rho_e = 1.0;
    double kappa = 1.0;
    double lambda_t = 1.0;
    double mu_t = 0.0;
    double L = 1.0;
};

inline Medium nondimensionalize(const DimensionalMedium& dm, int dim = 3) {
    if (!(dm.rho_b > 0.0) || !(dm.rho_e > 0.0) || !(dm.kappa > 0.0))
        throw ConfigError("densities and bulk modulus must be positive");
    if (dm.mu_t < 0.0 || !(dim * dm.lambda_t + 2.0 * dm.mu_t > 0.0))
        throw ConfigError("Lame constants violate strong convexity");
    const double m = dm.lambda_t + 2.0 * dm.mu_t;
    if (!(m > 0.0)) throw ConfigError("lambda + 2 mu must be positive");
    Medium md;
    md.delta = dm.rho_b / dm.rho_e;
    md.mu = dm.mu_t / m;
    md.lambda = dm.lambda_t / m;
    md.tau = std::sqrt(dm.kappa / dm.rho_b) / std::sqrt(m / dm.rho_e);
    return md;
}

/// Angular frequency omega = k c_b / L for a non-dimensional wavenumber k.
inline std::complex<double> dimensional_frequency(const DimensionalMedium& dm, std::complex<double> k) {
    if (!(dm.L > 0.0) || !(dm.rho_b > 0.0)) throw ConfigError("length scale and density must be positive");
    return k * std::sqrt(dm.kappa / dm.rho_b) / dm.L;
}

} // namespace minnaert
