#pragma once

// Resonances of the unit disk and the unit ball from the 2x2 determinant
// condition det B(k) = 0, with the closed-form leading-order roots.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minnaert/error.hpp"
#include "minnaert/medium.hpp"
#include "minnaert/specfun.hpp"

namespace minnaert {

using cplx = std::complex<double>;

struct Zetas {
    cplx z1, z2, z3, z4;
};

namespace detail {

inline void require_dim(int dim) {
    if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
}

inline void require_nonzero(cplx k) {
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw DomainError("wavenumber must be finite");
    if (k == cplx(0.0)) throw SingularityError("wavenumber must be nonzero");
}

} // namespace detail

/// Eigenvalues of the unit-disk operators on the constant and normal densities.
inline Zetas zetas_2d(const Medium& m, cplx k) {
    using specfun::bessel_J;
    using specfun::hankel1_H;
    using std::numbers::pi;
    detail::require_nonzero(k);
    const cplx I(0, 1);
    const double c = m.cp2();
    const cplx kp = m.k_p(k);
    const cplx j1 = bessel_J(1, 0, kp), h1 = hankel1_H(1, 0, kp), dh1 = hankel1_H(1, 1, kp);
    Zetas z;
    z.z1 = -I * pi * j1 * h1 / (2.0 * c);
    z.z2 = -I * pi * j1 * (c * kp * dh1 + m.lambda * h1) / (2.0 * c) - 0.5;
    z.z3 = -0.5 * I * pi * bessel_J(0, 0, k) * hankel1_H(0, 0, k);
    z.z4 = 0.5 - 0.5 * I * pi * k * bessel_J(0, 1, k) * hankel1_H(0, 0, k);
    return z;
}

/// Eigenvalues of the operators of a ball of radius R on the constant and normal densities.
inline Zetas zetas_3d(const Medium& m, cplx k, double R = 1.0) {
    using specfun::sph_bessel_j;
    using specfun::sph_hankel1_h;
    detail::require_nonzero(k);
    if (!(R > 0.0)) throw ConfigError("radius must be positive");
    const cplx I(0, 1);
    const double c = m.cp2();
    const cplx kp = m.k_p(k);
    const cplx x = kp * R, y = k * R;
    const cplx j1 = sph_bessel_j(1, 0, x), h1 = sph_hankel1_h(1, 0, x), h0p = sph_hankel1_h(0, 0, x);
    Zetas z;
    z.z1 = -I * R * R * kp * h1 * j1 / c;
    z.z2 = 4.0 * I * m.mu * R * kp / c * j1 * h1 - I * R * R * kp * kp * j1 * h0p - 0.5;
    z.z3 = -I * k * R * R * sph_hankel1_h(0, 0, y) * sph_bessel_j(0, 0, y);
    z.z4 = 0.5 - I * k * k * R * R * sph_bessel_j(0, 1, y) * sph_hankel1_h(0, 0, y);
    return z;
}

struct BMatrix {
    Eigen::Matrix2cd entries;
    cplx k;
    int dim = 3;
    Medium medium;

    cplx det() const { return entries(0, 0) * entries(1, 1) - entries(0, 1) * entries(1, 0); }
    /// Size of the products cancelling in the determinant.
    double scale() const {
        return std::abs(entries(0, 0) * entries(1, 1)) + std::abs(entries(0, 1) * entries(1, 0));
    }
};

inline BMatrix b_matrix(int dim, const Medium& m, cplx k) {
    detail::require_dim(dim);
    detail::require_nonzero(k);
    const Zetas z = dim == 2 ? zetas_2d(m, k) : zetas_3d(m, k);
    BMatrix b;
    b.k = k;
    b.dim = dim;
    b.medium = m;
    b.entries << (-0.5 + z.z4) / (k * k), -z.z1, m.delta * m.tau * m.tau * z.z3, 0.5 + z.z2;
    return b;
}

enum class RootMethod { det_newton, asymptotic_3d, leading_3d, leading_2d, general_residual };

inline std::string to_string(RootMethod m) {
    switch (m) {
    case RootMethod::det_newton: return "det_newton";
    case RootMethod::asymptotic_3d: return "asymptotic_3d";
    case RootMethod::leading_3d: return "leading_3d";
    case RootMethod::leading_2d: return "leading_2d";
    case RootMethod::general_residual: return "general_residual";
    }
    return "unknown";
}

struct ResonanceResult {
    cplx k_root;
    double residual = 0.0;
    RootMethod method = RootMethod::det_newton;
    int iterations = 0;
    bool converged = false;
    bool physical = true; // Re k > 0 and Im k <= 0
};

inline bool is_physical(cplx k) { return k.real() > 0.0 && k.imag() <= 0.0; }

/// Newton iteration on det B(k) with a central-difference derivative.
inline ResonanceResult find_root(int dim, const Medium& m, cplx guess, int max_iterations = 100) {
    detail::require_dim(dim);
    m.validate();
    detail::require_nonzero(guess);
    if (!(guess.real() > 0.0)) throw DomainError("initial guess must have positive real part");
    ResonanceResult r;
    r.method = RootMethod::det_newton;
    cplx k = guess;
    for (int it = 1; it <= max_iterations; ++it) {
        const BMatrix b = b_matrix(dim, m, k);
        const cplx d = b.det();
        r.iterations = it;
        if (std::abs(d) < 1e-13 * b.scale()) {
            r.converged = true;
            break;
        }
        const double h = 1e-7 * std::max(1.0, std::abs(k));
        const cplx dd = (b_matrix(dim, m, k + h).det() - b_matrix(dim, m, k - h).det()) / (2.0 * h);
        if (dd == cplx(0.0) || !std::isfinite(std::abs(dd))) break;
        const cplx step = d / dd;
        k -= step;
        if (!(std::abs(k) > 0.0) || !std::isfinite(std::abs(k))) break;
        if (std::abs(step) < 1e-12) {
            r.converged = true;
            break;
        }
    }
    r.k_root = k;
    if (std::isfinite(std::abs(k)) && k != cplx(0.0)) {
        const BMatrix b = b_matrix(dim, m, k);
        r.residual = std::abs(b.det()) / b.scale();
    } else {
        r.converged = false;
    }
    r.physical = is_physical(k);
    return r;
}

struct AsymptoticRoots {
    cplx k_plus, k_minus;
    bool overdamped = false; // negative discriminant: both roots on the imaginary axis
};

/// Closed-form roots (+-sqrt(a (4(lambda + mu) - 3 t^2 d)) - a i) / (2 t c_p), a = 3 t^2 d + 4 mu.
/// They solve d t^2 + 4mu/3 - i k (3 t^3 d + 4 t mu)/(3 c_p) - k^2 t^2 / 3 = 0; the O(d k^2) term of the
/// truncated ball polynomial is not part of this quadratic.
inline AsymptoticRoots asymptotic_root_3d(const Medium& m) {
    m.validate();
    const double t2d = m.tau * m.tau * m.delta;
    const double a = 3.0 * t2d + 4.0 * m.mu;
    const double disc = a * (4.0 * (m.lambda + m.mu) - 3.0 * t2d);
    const double den = 2.0 * m.tau * m.cp();
    AsymptoticRoots r;
    const cplx sq = std::sqrt(cplx(disc, 0.0));
    r.overdamped = disc < 0.0;
    r.k_plus = (sq - cplx(0, a)) / den;
    r.k_minus = (-sq - cplx(0, a)) / den;
    return r;
}

/// Real leading-order ball resonance sqrt(3 delta + 4 mu / tau^2).
inline double leading_root_3d(const Medium& m) {
    if (!(m.delta >= 0.0) || !(m.mu >= 0.0) || !(m.tau > 0.0) || !std::isfinite(m.delta) || !std::isfinite(m.mu) ||
        !std::isfinite(m.tau))
        throw ConfigError("leading_root_3d needs delta, mu >= 0 and tau > 0");
    return std::sqrt(3.0 * m.delta + 4.0 * m.mu / (m.tau * m.tau));
}

/// Leading-order disk resonance: root of
/// (mu + d t^2)/(4 c) + k^2 t^2 lambda (gamma + 2 ln(k t / sqrt c))/(16 c^2) with c = lambda + 2 mu.
inline ResonanceResult leading_root_2d(const Medium& m) {
    m.validate();
    const double c = m.cp2();
    const double a = m.mu + m.delta * m.tau * m.tau;
    if (!(a > 0.0)) throw ConfigError("leading_root_2d needs mu + delta tau^2 > 0");
    const cplx g = specfun::gamma_constant();
    const double t2 = m.tau * m.tau;
    auto factor = [&](cplx k) {
        return a / (4.0 * c) + k * k * t2 * m.lambda * (g + 2.0 * std::log(k * m.tau / std::sqrt(c))) / (16.0 * c * c);
    };
    ResonanceResult r;
    r.method = RootMethod::leading_2d;
    cplx k = 0.1;
    for (int it = 1; it <= 200; ++it) {
        cplx next = std::sqrt(-4.0 * c * a / (t2 * m.lambda * (g + 2.0 * std::log(k * m.tau / std::sqrt(c)))));
        if (next.real() < 0.0) next = -next;
        r.iterations = it;
        const bool small = std::abs(next - k) < 1e-14 * std::abs(next);
        k = next;
        if (small) break;
    }
    for (int it = 0; it < 20; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(k));
        const cplx d = (factor(k + h) - factor(k - h)) / (2.0 * h);
        const cplx step = factor(k) / d;
        k -= step;
        ++r.iterations;
        if (std::abs(step) < 1e-15 * std::abs(k)) break;
    }
    r.k_root = k;
    r.residual = std::abs(factor(k)) / (a / (4.0 * c));
    r.converged = r.residual < 1e-12;
    r.physical = is_physical(k);
    return r;
}

struct Table1Row {
    Medium medium;
    ResonanceResult k_b2, k_d2, k_b3, k_d3;
};

/// Default media lambda = tau = 1, mu = delta = 10^-i for i = 2, 3, 4.
inline std::vector<Medium> table1_media() {
    return {Medium::table(1e-2), Medium::table(1e-3), Medium::table(1e-4)};
}

inline Table1Row table1_row(const Medium& m) {
    Table1Row row;
    row.medium = m;
    row.k_d2 = leading_root_2d(m);
    row.k_b2 = find_root(2, m, row.k_d2.k_root);
    const AsymptoticRoots ar = asymptotic_root_3d(m);
    row.k_d3.k_root = ar.k_plus;
    row.k_d3.method = RootMethod::asymptotic_3d;
    row.k_d3.converged = !ar.overdamped;
    row.k_d3.physical = is_physical(ar.k_plus);
    row.k_b3 = find_root(3, m, ar.k_plus);
    return row;
}

inline std::vector<Table1Row> table1(const std::vector<Medium>& media = table1_media()) {
    std::vector<Table1Row> rows;
    rows.reserve(media.size());
    for (const Medium& m : media) rows.push_back(table1_row(m));
    return rows;
}

struct SweepPoint {
    double k;
    double amplitude; // 1 / sigma_min(B(k))
};

inline std::vector<SweepPoint> amplitude_sweep(int dim, const Medium& m, double k_min, double k_max, int steps) {
    detail::require_dim(dim);
    m.validate();
    if (!(k_min > 0.0) || !(k_max > k_min) || steps < 2) throw ConfigError("sweep needs 0 < k_min < k_max and steps >= 2");
    std::vector<SweepPoint> out;
    out.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const double k = k_min + (k_max - k_min) * i / (steps - 1);
        const BMatrix b = b_matrix(dim, m, k);
        const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(b.entries);
        out.push_back({k, 1.0 / svd.singularValues()(1)});
    }
    return out;
}

/// Grid point of largest amplitude.
inline SweepPoint sweep_peak(const std::vector<SweepPoint>& rows) {
    if (rows.empty()) throw ConfigError("empty sweep");
    return *std::max_element(rows.begin(), rows.end(),
                             [](const SweepPoint& a, const SweepPoint& b) { return a.amplitude < b.amplitude; });
}

} // namespace minnaert
