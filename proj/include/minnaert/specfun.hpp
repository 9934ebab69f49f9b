#pragma once

// Cylindrical and spherical Bessel/Hankel functions of orders 0 and 1 for
// complex arguments, with first derivatives.
//
// Cylindrical functions use the ascending power series for |z| <= 14 and the
// Hankel asymptotic expansion beyond. In the upper half plane H^(1) decays while
// the series terms grow, so H^(1) switches earlier, at |z| = 12 - 3 Im z / |z|;
// relative accuracy there is about 1e-8 near the imaginary axis at |z| ~ 9 and
// 1e-11 or better elsewhere. The logarithm is the principal branch
// (cut on the negative real axis). Spherical functions use closed forms with
// the ascending series below |z| = 1.

#include <cmath>
#include <complex>
#include <numbers>

#include "minnaert/error.hpp"

namespace minnaert::specfun {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.577215664901532860606512090082;

// gamma = 2 E_c - i pi - 2 ln 2, the constant of the small-argument Hankel expansion.
inline cplx gamma_constant() {
    return {2.0 * euler_gamma - 2.0 * std::numbers::ln2, -std::numbers::pi};
}

namespace detail {

inline constexpr double series_cutoff = 14.0;

inline void require_finite(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("specfun: non-finite argument");
}

inline void require_order(int order, int deriv) {
    if (order != 0 && order != 1)
        throw UnsupportedOrderError("specfun: only orders 0 and 1 are supported");
    if (deriv != 0 && deriv != 1)
        throw UnsupportedOrderError("specfun: only derivative orders 0 and 1 are supported");
}

// J_n(z) = sum_m (-1)^m (z/2)^(2m+n) / (m! (m+n)!)
inline cplx series_j(int n, cplx z) {
    const cplx q = -0.25 * z * z;
    cplx term = (n == 0) ? cplx(1.0) : 0.5 * z;
    cplx sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= q / (double(m) * double(m + n));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && m > 2) break;
    }
    return sum;
}

// Y_0 and Y_1 from the Neumann-type ascending series.
inline cplx series_y0(cplx z) {
    using std::numbers::pi;
    const cplx q = 0.25 * z * z;
    cplx term = 1.0;
    double harmonic = 0.0;
    cplx tail = 0.0;
    for (int m = 1; m < 200; ++m) {
        term *= -q / (double(m) * double(m));
        harmonic += 1.0 / m;
        const cplx add = -term * harmonic;
        tail += add;
        if (std::abs(add) <= 1e-17 * std::abs(tail) && m > 2) break;
    }
    return (2.0 / pi) * ((std::log(0.5 * z) + euler_gamma) * series_j(0, z) + tail);
}

inline cplx series_y1(cplx z) {
    using std::numbers::pi;
    // Y1 = (2/pi) J1 ln(z/2) - 2/(pi z) - (1/pi) sum_m (-1)^m (psi(m+1)+psi(m+2)) (z/2)^(2m+1) / (m!(m+1)!)
    const cplx half = 0.5 * z;
    const cplx q = -half * half;
    cplx term = half; // (z/2)^(2m+1)(-1)^m / (m!(m+1)!) at m = 0
    double psi1 = -euler_gamma;      // psi(m+1)
    double psi2 = 1.0 - euler_gamma; // psi(m+2)
    cplx sum = term * (psi1 + psi2);
    for (int m = 1; m < 200; ++m) {
        term *= q / (double(m) * double(m + 1));
        psi1 += 1.0 / m;
        psi2 += 1.0 / (m + 1);
        const cplx add = term * (psi1 + psi2);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum) && m > 2) break;
    }
    return (2.0 / pi) * series_j(1, z) * std::log(half) - 2.0 / (pi * z) - sum / pi;
}

// Hankel asymptotic expansion of H^(1)_n (kind = 1) or H^(2)_n (kind = 2).
inline cplx asymptotic_h(int n, cplx z, int kind) {
    using std::numbers::pi;
    const double mu = 4.0 * n * n;
    const cplx phase = z - 0.5 * n * pi - 0.25 * pi;
    const cplx unit = (kind == 1) ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
    cplx sum = 1.0;
    cplx term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= unit * (mu - odd * odd) / (8.0 * k * z);
        const double mag = std::abs(term);
        if (mag > last) break;
        sum += term;
        last = mag;
        if (mag < 1e-17) break;
    }
    return std::sqrt(2.0 / (pi * z)) * std::exp(unit * phase) * sum;
}

inline cplx j_value(int n, cplx z) {
    if (std::abs(z) <= series_cutoff) return series_j(n, z);
    return 0.5 * (asymptotic_h(n, z, 1) + asymptotic_h(n, z, 2));
}

inline bool h1_uses_series(cplx z) {
    const double r = std::abs(z);
    if (z.imag() <= 0.0) return r <= series_cutoff;
    return r <= 12.0 - 3.0 * z.imag() / r;
}

inline cplx h1_value(int n, cplx z) {
    if (h1_uses_series(z)) {
        const cplx y = (n == 0) ? series_y0(z) : series_y1(z);
        return series_j(n, z) + cplx(0.0, 1.0) * y;
    }
    return asymptotic_h(n, z, 1);
}

} // namespace detail

/// Bessel function of the first kind J_order(z) or its derivative.
inline cplx bessel_J(int order, int deriv, cplx z) {
    detail::require_order(order, deriv);
    detail::require_finite(z);
    if (deriv == 0) return detail::j_value(order, z);
    if (order == 0) return -detail::j_value(1, z);
    if (z == cplx(0.0)) return 0.5;
    return detail::j_value(0, z) - detail::j_value(1, z) / z;
}

/// Hankel function of the first kind H^(1)_order(z) or its derivative. z = 0 is singular.
inline cplx hankel1_H(int order, int deriv, cplx z) {
    detail::require_order(order, deriv);
    detail::require_finite(z);
    if (z == cplx(0.0)) throw SingularityError("hankel1_H: singular at z = 0");
    if (deriv == 0) return detail::h1_value(order, z);
    if (order == 0) return -detail::h1_value(1, z);
    return detail::h1_value(0, z) - detail::h1_value(1, z) / z;
}

/// Spherical Bessel function j_order(z) or its derivative.
inline cplx sph_bessel_j(int order, int deriv, cplx z) {
    detail::require_order(order, deriv);
    detail::require_finite(z);
    if (std::abs(z) < 1.0) {
        // j0 = sum b_m z^2m, j1 = sum a_m z^(2m+1) with b_m = (-1/2)^m / (m! (2m+1)!!), a_m = (-1/2)^m / (m! (2m+3)!!)
        const cplx z2 = z * z;
        cplx b = 1.0, a = 1.0 / 3.0, pw = 1.0;
        cplx j0 = b, j1 = a * z, dj1 = a;
        for (int m = 1; m < 40; ++m) {
            b *= -0.5 / (m * (2.0 * m + 1.0));
            a *= -0.5 / (m * (2.0 * m + 3.0));
            pw *= z2;
            j0 += b * pw;
            j1 += a * pw * z;
            dj1 += (2.0 * m + 1.0) * a * pw;
            if (std::abs(a * pw) < 1e-18) break;
        }
        if (deriv == 0) return order == 0 ? j0 : j1;
        return order == 0 ? -j1 : dj1;
    }
    const cplx z2 = z * z;
    const cplx s = std::sin(z), c = std::cos(z);
    const cplx j0 = s / z;
    const cplx j1 = s / z2 - c / z;
    if (deriv == 0) return order == 0 ? j0 : j1;
    if (order == 0) return -j1;
    return j0 - 2.0 * j1 / z;
}

/// Spherical Hankel function of the first kind h_order(z) or its derivative.
/// h0(z) = -i e^{iz}/z, h1(z) = -(z + i) e^{iz}/z^2.
inline cplx sph_hankel1_h(int order, int deriv, cplx z) {
    detail::require_order(order, deriv);
    detail::require_finite(z);
    if (z == cplx(0.0)) throw SingularityError("sph_hankel1_h: singular at z = 0");
    const cplx I(0.0, 1.0);
    const cplx e = std::exp(I * z);
    const cplx h0 = -I * e / z;
    const cplx h1 = -(z + I) * e / (z * z);
    if (deriv == 0) return order == 0 ? h0 : h1;
    if (order == 0) return -h1;
    return h0 - 2.0 * h1 / z;
}

} // namespace minnaert::specfun
