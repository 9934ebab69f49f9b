#pragma once

// Quadrature verification checks: closed-form unit-sphere identities and
// shape-independent properties (jump relation, s-wave kernel, series consistency).

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "minnaert/medium.hpp"
#include "minnaert/potentials.hpp"
#include "minnaert/surface.hpp"

namespace minnaert::verify {

enum class Status { pass, fail, info, skip };

inline std::string to_string(Status s) {
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::info: return "info";
    case Status::skip: return "skip";
    }
    return "unknown";
}

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    Status status = Status::skip;
};

inline double relative_l2(const QuadratureSurface& s, const ScalarDensity& got, const ScalarDensity& want) {
    return l2_norm(s, ScalarDensity(got - want)) / l2_norm(s, want);
}

inline double relative_l2(const QuadratureSurface& s, const VectorDensity& got, const VectorDensity& want) {
    return l2_norm(s, VectorDensity(got - want)) / l2_norm(s, want);
}

/// Richardson-extrapolated exterior normal derivative of S^k[phi] from offsets h, h/2, h/4,
/// compared with (I/2 + K^{k,*})[phi]; relative L2 error.
inline double jump_relation_error(const QuadratureSurface& s, cplx k, const ScalarDensity& phi, double h = 0.08) {
    const auto [S, K] = helm_single_and_np(s, k, phi);
    std::array<ScalarDensity, 3> d;
    for (int i = 0; i < 3; ++i) {
        const double hi = h / double(1 << i);
        d[i] = (helm_single_layer_offset(s, k, phi, hi) - S) / hi;
    }
    const ScalarDensity r1a = 2.0 * d[1] - d[0], r1b = 2.0 * d[2] - d[1];
    const ScalarDensity limit = (4.0 * r1b - r1a) / 3.0;
    return relative_l2(s, limit, ScalarDensity(0.5 * phi + K));
}

/// The 26 points 2 e / |e| for e in {-1, 0, 1}^3 \ {0}.
inline std::vector<Vec3> probe_points(double radius = 2.0) {
    std::vector<Vec3> p;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                if (a != 0 || b != 0 || c != 0) p.push_back(radius * Vec3(a, b, c).normalized());
    return p;
}

/// max over probes of |S^{omega,s}[nu](x)| for points outside the surface.
inline double kernel_membership(const QuadratureSurface& s, const Medium& m, cplx k, double radius = 2.0) {
    const VectorDensity nu = normal_density(s);
    double worst = 0.0;
    for (const Vec3& x : probe_points(radius * s.axes.maxCoeff()))
        worst = std::max(worst, s_wave_exterior(s, m, k, nu, x).norm());
    return worst;
}

/// Relative L2 mismatch of the order-J series of S^k and K^{k,*} against the direct operators.
inline std::pair<double, double> series_vs_direct(const QuadratureSurface& s, cplx k, int J, const ScalarDensity& phi) {
    const SeriesScalar ser = series_scalar_all(s, J, phi);
    const auto [S, K] = helm_single_and_np(s, k, phi);
    ScalarDensity ss = ScalarDensity::Zero(s.size()), kk = ScalarDensity::Zero(s.size());
    cplx kj = 1.0;
    for (int j = 0; j <= J; ++j) {
        ss += kj * ser.S[j];
        kk += kj * ser.Kstar[j];
        kj *= k;
    }
    return {relative_l2(s, ss, S), relative_l2(s, kk, K)};
}

/// Smooth random density: a random quadratic polynomial in the node coordinates plus a constant.
inline ScalarDensity random_smooth_density(const QuadratureSurface& s, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> g;
    std::array<double, 10> c;
    for (double& v : c) v = g(gen);
    c[0] += 2.0;
    ScalarDensity f(s.size());
    for (int q = 0; q < s.size(); ++q) {
        const Vec3& x = s.nodes[q];
        f(q) = c[0] + c[1] * x.x() + c[2] * x.y() + c[3] * x.z() + c[4] * x.x() * x.y() + c[5] * x.y() * x.z() +
               c[6] * x.z() * x.x() + c[7] * x.x() * x.x() + c[8] * x.y() * x.y() + c[9] * x.z() * x.z();
    }
    return f;
}

/// Tangential L2 fraction of a vector density.
inline double tangential_fraction(const QuadratureSurface& s, const VectorDensity& v) {
    const VectorDensity nu = normal_density(s);
    const ScalarDensity vn = (v.array() * nu.array()).rowwise().sum();
    return l2_norm(s, VectorDensity(v - vn.asDiagonal() * nu)) / l2_norm(s, v);
}

struct Options {
    double identity_tol = 1e-3;
    double integral_tol = 1e-4;
    double c0_tol = 1e-4;
    double jump_tol = 5e-3; // at 40 polar rings, scaled by (40 / n_theta)^2 below that
    double kernel_tol = 1e-3;
    double series_tol = 1e-9;
    double jump_k = 0.1;
    double series_k = 0.1;
    int series_order = 8;
    unsigned seed = 0;
};

inline double jump_tolerance(const QuadratureSurface& s, const Options& o) {
    const double r = 40.0 / std::max(1, s.n_theta);
    return o.jump_tol * std::max(1.0, r * r);
}

/// Runs the verification suite. Closed-form identities apply to the unit sphere only and are
/// skipped on other shapes; R_{2,0}[nu] normality is informational on non-spherical shapes.
inline std::vector<Check> run(const QuadratureSurface& s, const Medium& m, const Options& o = {}) {
    using std::numbers::pi;
    if (s.dim != 3) throw ConfigError("verification runs on three-dimensional surfaces");
    m.validate();
    const bool sphere = s.descriptor.kind == ShapeKind::unit_sphere ||
                        (s.axes - Vec3::Ones()).cwiseAbs().maxCoeff() == 0.0;
    const int n = s.size();
    const ScalarDensity one = ScalarDensity::Ones(n);
    const VectorDensity nu = normal_density(s);
    std::vector<Check> out;
    auto add = [&](const std::string& name, double measured, double tol) {
        out.push_back({name, measured, tol, measured < tol ? Status::pass : Status::fail});
    };
    auto skip = [&](const std::string& name, double tol) { out.push_back({name, 0.0, tol, Status::skip}); };

    const ScalarDensity phi0 = static_single_layer_inverse(s, one);
    const SeriesVector nv = series_vector_all(s, 2, nu);
    const SeriesScalar s0 = series_scalar_all(s, 2, phi0);
    const cplx c0 = integrate_scalar(s, s0.Kstar[2]) /
                    integrate_scalar(s, ScalarDensity((nu.array() * nv.S[0].array()).rowwise().sum() / m.cp2()));

    if (sphere) {
        add("S0^-1[1] = -1", relative_l2(s, phi0, ScalarDensity(-one)), o.identity_tol);
        add("S0[nu] = -nu/3", relative_l2(s, nv.S[0], VectorDensity(-nu / 3.0)), o.identity_tol);
        const cplx kint = integrate_scalar(s, series_Kstar_j(s, 2, ScalarDensity(-one)));
        add("int K*_2[-1] = -4pi/3", std::abs(kint + 4.0 * pi / 3.0) / (4.0 * pi / 3.0), o.integral_tol);
        add("R_{1,0}[nu] = -nu/2", relative_l2(s, nv.R1[0], VectorDensity(-nu / 2.0)), o.identity_tol);
        add("R_{2,0}[nu] = nu/3", relative_l2(s, nv.R2[0], VectorDensity(nu / 3.0)), o.identity_tol);
        add("R_{1,2}[nu] = -nu/3", relative_l2(s, nv.R1[2], VectorDensity(-nu / 3.0)), o.identity_tol);
        add("c0 = lambda + 2 mu", std::abs(c0 - m.cp2()) / m.cp2(), o.c0_tol);
    } else {
        for (const char* name : {"S0^-1[1] = -1", "S0[nu] = -nu/3", "int K*_2[-1] = -4pi/3", "R_{1,0}[nu] = -nu/2"})
            skip(name, o.identity_tol);
        out.push_back({"R_{2,0}[nu] normal (tangential fraction)", tangential_fraction(s, nv.R2[0]), 0.02, Status::info});
        skip("R_{1,2}[nu] = -nu/3", o.identity_tol);
        out.push_back({"c0 (real part)", c0.real(), 0.0, Status::info});
    }

    const double jt = jump_tolerance(s, o);
    ScalarDensity deg1(n), deg2(n);
    for (int q = 0; q < n; ++q) {
        deg1(q) = s.param[q].z();
        deg2(q) = s.param[q].x() * s.param[q].y();
    }
    add("jump relation, constant density", jump_relation_error(s, o.jump_k, one), jt);
    add("jump relation, degree-1 density", jump_relation_error(s, o.jump_k, deg1), jt);
    add("jump relation, degree-2 density", jump_relation_error(s, o.jump_k, deg2), jt);

    if (m.mu > 0.0)
        add("nu in ker S^{omega,s}", kernel_membership(s, m, o.series_k), o.kernel_tol);
    else
        skip("nu in ker S^{omega,s}", o.kernel_tol);

    const auto [es, ek] = series_vs_direct(s, o.series_k, o.series_order, random_smooth_density(s, o.seed));
    add("series vs direct S^k", es, o.series_tol);
    add("series vs direct K^{k,*}", ek, o.series_tol);
    return out;
}

inline bool all_passed(const std::vector<Check>& checks) {
    for (const Check& c : checks)
        if (c.status == Status::fail) return false;
    return true;
}

} // namespace minnaert::verify
