#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "minnaert/error.hpp"

namespace minnaert::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [-1, 1], nodes ascending.
inline Rule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

/// Gauss-Legendre rule mapped to [a, b].
inline Rule gauss_legendre(int n, double a, double b) {
    Rule r = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

/// Kress weights R_j(t) for int_0^{2pi} ln(4 sin^2((t - s)/2)) f(s) ds on the
/// 2n-point equispaced grid s_j = j pi / n, evaluated at t = t_i (offset i - j).
/// Returns the weights indexed by (i - j) mod 2n.
inline std::vector<double> kress_log_weights(int npoints) {
    if (npoints < 4 || npoints % 2 != 0)
        throw ConfigError("kress_log_weights: need an even number of points >= 4");
    const int n = npoints / 2;
    std::vector<double> w(npoints);
    for (int d = 0; d < npoints; ++d) {
        const double t = std::numbers::pi * d / n;
        double s = 0.0;
        for (int m = 1; m < n; ++m) s += std::cos(m * t) / m;
        w[d] = -2.0 * std::numbers::pi / n * s - std::numbers::pi / (double(n) * n) * std::cos(n * t);
    }
    return w;
}

/// Smooth cutoff equal to one at s = 0, zero for s >= 1, C-infinity in between.
inline double partition_of_unity(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return std::exp(2.0 * std::exp(-1.0 / s) / (s - 1.0));
}

/// Lagrange basis weights for interpolating at x from the nodes xs.
inline void lagrange_weights(const double* xs, int n, double x, double* out) {
    for (int a = 0; a < n; ++a) {
        double num = 1.0, den = 1.0;
        for (int b = 0; b < n; ++b) {
            if (b == a) continue;
            num *= x - xs[b];
            den *= xs[a] - xs[b];
        }
        out[a] = num / den;
    }
}

} // namespace minnaert::quad
