#pragma once

// Layer potentials on a QuadratureSurface.
//
// 3D operators use the Nystrom engine in layer_quadrature.hpp; the 2D unit
// circle uses Kress' logarithmic product quadrature. Series operators follow
// the low-frequency expansion G^k = sum_j k^j G_j of the 3D fundamental solution.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minnaert/error.hpp"
#include "minnaert/layer_quadrature.hpp"
#include "minnaert/medium.hpp"
#include "minnaert/specfun.hpp"
#include "minnaert/surface.hpp"

namespace minnaert {

inline constexpr int max_series_order = 12;

namespace detail {

inline constexpr double inv4pi = 0.25 / std::numbers::pi;

inline void require_3d(const QuadratureSurface& s, const char* what) {
    if (s.dim != 3) throw ConfigError(std::string(what) + ": series operators are defined in three dimensions only");
}

inline void require_order(int j) {
    if (j < 0 || j > max_series_order) throw ConfigError("series order out of range");
}

inline void require_finite(cplx k) {
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw DomainError("wavenumber must be finite");
}

inline double factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}

inline cplx ipow(int j) {
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((j % 4) + 4) % 4];
}

// Coefficient of r^(j-1) in S_j and of r^(j-3) (x-y).n in K*_j.
inline cplx s_coef(int j) { return -cplx(0, 1) * inv4pi * ipow(j - 1) / factorial(j); }
inline cplx k_coef(int j) { return -ipow(j) * double(j - 1) * inv4pi / factorial(j); }

// 3D Helmholtz kernel -e^{ikr}/(4 pi r) and its normal-derivative factor.
inline cplx green3(cplx k, double r) {
    if (k == cplx(0.0)) return -inv4pi / r;
    return -std::exp(cplx(0, 1) * k * r) * inv4pi / r;
}
// d/dr of the kernel divided by r: grad_x G = dgreen3(k, r) (x - y)
inline cplx dgreen3(cplx k, double r) {
    if (k == cplx(0.0)) return inv4pi / (r * r * r);
    const cplx ikr = cplx(0, 1) * k * r;
    return -std::exp(ikr) * (ikr - 1.0) * inv4pi / (r * r * r);
}

// --- 2D unit circle (Kress quadrature) ---

inline void check_circle(const QuadratureSurface& s, int n) {
    if (n != s.size()) throw ShapeError("density length does not match the surface");
}

inline Eigen::MatrixXcd circle_single_layer(const QuadratureSurface& s, cplx k) {
    using std::numbers::pi;
    const int n = s.size();
    const std::vector<double> R = quad::kress_log_weights(n);
    const double h = 2.0 * pi / n;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = ((i - j) % n + n) % n;
            const double dt = h * (i - j);
            const double r = 2.0 * std::abs(std::sin(0.5 * dt));
            const double lg = (d == 0) ? 0.0 : std::log(4.0 * std::sin(0.5 * dt) * std::sin(0.5 * dt));
            cplx m1, m2;
            if (k == cplx(0.0)) {
                m1 = inv4pi;
                m2 = 0.0;
            } else if (d == 0) {
                m1 = inv4pi;
                m2 = cplx(0, -0.25) + (std::log(0.5 * k) + specfun::euler_gamma) / (2.0 * pi);
            } else {
                m1 = inv4pi * specfun::bessel_J(0, 0, k * r);
                m2 = cplx(0, -0.25) * specfun::hankel1_H(0, 0, k * r) - m1 * lg;
            }
            m(i, j) = R[d] * m1 + h * m2;
        }
    return m;
}

inline Eigen::MatrixXcd circle_np_adjoint(const QuadratureSurface& s, cplx k) {
    using std::numbers::pi;
    const int n = s.size();
    const std::vector<double> R = quad::kress_log_weights(n);
    const double h = 2.0 * pi / n;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = ((i - j) % n + n) % n;
            if (k == cplx(0.0) || d == 0) {
                m(i, j) = h * inv4pi;
                continue;
            }
            const double dt = h * (i - j);
            const double r = 2.0 * std::abs(std::sin(0.5 * dt));
            const double lg = std::log(r * r);
            const double proj = 0.5 * r; // (x - y).nu_x / r on the unit circle
            const cplx l1 = -k * inv4pi * specfun::bessel_J(1, 0, k * r) * proj;
            const cplx l = cplx(0, 0.25) * k * specfun::hankel1_H(1, 0, k * r) * proj;
            m(i, j) = R[d] * l1 + h * (l - l1 * lg);
        }
    return m;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Helmholtz single layer and Neumann-Poincare operators

/// S^k[phi] at the surface nodes.
inline ScalarDensity helm_single_layer(const QuadratureSurface& s, cplx k, const ScalarDensity& phi) {
    detail::require_finite(k);
    if (phi.size() != s.size()) throw ShapeError("density length does not match the surface");
    if (s.dim == 2) return detail::circle_single_layer(s, k) * phi;
    return layer::apply<1>(s, phi, [k](const Vec3& x, const Vec3&, const Vec3& y, const Vec3&, const auto& f) {
        return Eigen::Matrix<cplx, 1, 1>(detail::green3(k, (x - y).norm()) * f(0));
    });
}

/// S^k[phi](x) at a point x strictly outside the surface.
inline cplx helm_single_layer(const QuadratureSurface& s, cplx k, const ScalarDensity& phi, const Vec3& x) {
    detail::require_finite(k);
    if (phi.size() != s.size()) throw ShapeError("density length does not match the surface");
    const bool planar = s.dim == 2;
    return layer::apply_exterior<1>(s, x, phi,
                                    [k, planar](const Vec3& xx, const Vec3&, const Vec3& y, const Vec3&, const auto& f) {
                                        const double r = (xx - y).norm();
                                        cplx g;
                                        if (planar)
                                            g = (k == cplx(0.0)) ? cplx(std::log(r) / (2.0 * std::numbers::pi))
                                                                 : cplx(0, -0.25) * specfun::hankel1_H(0, 0, k * r);
                                        else
                                            g = detail::green3(k, r);
                                        return Eigen::Matrix<cplx, 1, 1>(g * f(0));
                                    })(0);
}

/// S^k[phi] at the points x_q + h nu_q, one per node (3D).
inline ScalarDensity helm_single_layer_offset(const QuadratureSurface& s, cplx k, const ScalarDensity& phi, double h) {
    detail::require_3d(s, "helm_single_layer_offset");
    detail::require_finite(k);
    if (!(h > 0.0)) throw DomainError("offset must be positive");
    const std::vector<LocalRule> rules = layer::offset_rules(s, h);
    std::vector<layer::Target> ts;
    ts.reserve(s.size());
    for (int q = 0; q < s.size(); ++q) ts.push_back(layer::node_target(s, q, rules, h));
    return layer::apply_at<1>(s, ts, phi, [k](const Vec3& x, const Vec3&, const Vec3& y, const Vec3&, const auto& f) {
        return Eigen::Matrix<cplx, 1, 1>(detail::green3(k, (x - y).norm()) * f(0));
    });
}

/// K^{k,*}[phi] at the surface nodes.
inline ScalarDensity helm_np_adjoint(const QuadratureSurface& s, cplx k, const ScalarDensity& phi) {
    detail::require_finite(k);
    if (phi.size() != s.size()) throw ShapeError("density length does not match the surface");
    if (s.dim == 2) return detail::circle_np_adjoint(s, k) * phi;
    return layer::apply<1>(s, phi, [k](const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3&, const auto& f) {
        const Vec3 d = x - y;
        return Eigen::Matrix<cplx, 1, 1>(detail::dgreen3(k, d.norm()) * d.dot(nx) * f(0));
    });
}

/// S^k[phi] and K^{k,*}[phi] in a single pass (3D), or via the circle matrices (2D).
inline std::pair<ScalarDensity, ScalarDensity> helm_single_and_np(const QuadratureSurface& s, cplx k,
                                                                  const ScalarDensity& phi) {
    detail::require_finite(k);
    if (phi.size() != s.size()) throw ShapeError("density length does not match the surface");
    if (s.dim == 2) return {detail::circle_single_layer(s, k) * phi, detail::circle_np_adjoint(s, k) * phi};
    const Eigen::Matrix<cplx, Eigen::Dynamic, 2> both =
        layer::apply<2>(s, phi, [k](const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3&, const auto& f) {
            const Vec3 d = x - y;
            const double r = d.norm();
            const cplx e = (k == cplx(0.0)) ? cplx(1.0) : std::exp(cplx(0, 1) * k * r);
            const cplx g = -e * detail::inv4pi / r;
            const cplx dg = -e * (cplx(0, 1) * k * r - 1.0) * detail::inv4pi / (r * r * r);
            return Eigen::Matrix<cplx, 1, 2>(g * f(0), dg * d.dot(nx) * f(0));
        });
    return {both.col(0), both.col(1)};
}

/// Static double layer K_0[phi], the L2 adjoint of K*_0 (3D).
inline ScalarDensity laplace_double_layer(const QuadratureSurface& s, const ScalarDensity& phi) {
    detail::require_3d(s, "laplace_double_layer");
    return layer::apply<1>(s, phi, [](const Vec3& x, const Vec3&, const Vec3& y, const Vec3& ny, const auto& f) {
        const Vec3 d = y - x;
        const double r = d.norm();
        return Eigen::Matrix<cplx, 1, 1>(detail::inv4pi * d.dot(ny) / (r * r * r) * f(0));
    });
}

/// Dense real matrix of S_{dD,0}.
inline Eigen::MatrixXd static_single_layer_matrix(const QuadratureSurface& s) {
    if (s.dim == 2) return detail::circle_single_layer(s, 0.0).real();
    return layer::assemble<double>(s, [](const Vec3& x, const Vec3&, const Vec3& y, const Vec3&) {
        return -detail::inv4pi / (x - y).norm();
    });
}

/// Dense real matrix of K*_{dD,0}.
inline Eigen::MatrixXd static_np_adjoint_matrix(const QuadratureSurface& s) {
    if (s.dim == 2) return detail::circle_np_adjoint(s, 0.0).real();
    return layer::assemble<double>(s, [](const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3&) {
        const Vec3 d = x - y;
        const double r = d.norm();
        return detail::inv4pi * d.dot(nx) / (r * r * r);
    });
}

/// Solves S_{dD,0}[phi] = f with a dense LU factorization.
inline ScalarDensity static_single_layer_inverse(const QuadratureSurface& s, const ScalarDensity& f) {
    if (f.size() != s.size()) throw ShapeError("density length does not match the surface");
    const Eigen::MatrixXd m = static_single_layer_matrix(s);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13))
        throw NumericalError("static single layer is numerically singular on this surface",
                             rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    ScalarDensity phi(f.size());
    phi.real() = lu.solve(Eigen::VectorXd(f.real()));
    phi.imag() = lu.solve(Eigen::VectorXd(f.imag()));
    const double res = (m * phi.real() - f.real()).norm() + (m * phi.imag() - f.imag()).norm();
    if (res > 1e-10 * std::max(1.0, f.norm()))
        throw NumericalError("static single layer solve did not reach the residual target", 1.0 / rcond);
    return phi;
}

// ---------------------------------------------------------------------------
// Low-frequency series operators (3D)

/// S_{dD,j}[phi].
inline ScalarDensity series_S_j(const QuadratureSurface& s, int j, const ScalarDensity& phi) {
    detail::require_3d(s, "series_S_j");
    detail::require_order(j);
    const cplx c = detail::s_coef(j);
    return layer::apply<1>(s, phi, [c, j](const Vec3& x, const Vec3&, const Vec3& y, const Vec3&, const auto& f) {
        const double r = (x - y).norm();
        return Eigen::Matrix<cplx, 1, 1>(c * std::pow(r, j - 1) * f(0));
    });
}

/// K*_{dD,j}[phi].
inline ScalarDensity series_Kstar_j(const QuadratureSurface& s, int j, const ScalarDensity& phi) {
    detail::require_3d(s, "series_Kstar_j");
    detail::require_order(j);
    if (phi.size() != s.size()) throw ShapeError("density length does not match the surface");
    if (j == 1) return ScalarDensity::Zero(s.size());
    const cplx c = detail::k_coef(j);
    return layer::apply<1>(s, phi, [c, j](const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3&, const auto& f) {
        const Vec3 d = x - y;
        const double r = d.norm();
        return Eigen::Matrix<cplx, 1, 1>(c * std::pow(r, j - 3) * d.dot(nx) * f(0));
    });
}

/// All S_{dD,j}[phi] and K*_{dD,j}[phi] for j = 0..J in one pass.
struct SeriesScalar {
    std::vector<ScalarDensity> S;
    std::vector<ScalarDensity> Kstar;
};

inline SeriesScalar series_scalar_all(const QuadratureSurface& s, int J, const ScalarDensity& phi) {
    detail::require_3d(s, "series_scalar_all");
    detail::require_order(J);
    if (phi.size() != s.size()) throw ShapeError("density length does not match the surface");
    std::array<cplx, max_series_order + 1> cs{}, ck{};
    for (int j = 0; j <= J; ++j) {
        cs[j] = detail::s_coef(j);
        ck[j] = detail::k_coef(j);
    }
    const int n = s.size();
    const layer::PaddedGrid<1> grid(s, phi);
    SeriesScalar out;
    out.S.assign(J + 1, ScalarDensity::Zero(n));
    out.Kstar.assign(J + 1, ScalarDensity::Zero(n));
    for (int q = 0; q < n; ++q) {
        const layer::Target t = layer::node_target(s, q, s.ring_rules);
        std::array<cplx, max_series_order + 1> as{}, ak{};
        auto add = [&](const Vec3& y, double w, cplx f) {
            const Vec3 d = t.x - y;
            const double r = d.norm();
            const double dn = d.dot(t.nx) / (r * r);
            cplx rp = w * f / r; // w f r^(j-1)
            for (int j = 0; j <= J; ++j) {
                as[j] += rp;
                ak[j] += dn * rp;
                rp *= r;
            }
        };
        layer::visit(
            s, t, [&](int r, const Vec3& y, const Vec3&, double w) { add(y, w, phi(r)); },
            [&](const LocalPoint& p, const Vec3& y, const Vec3&, double w) {
                add(y, w, grid.at(p, t.shift)(0));
            });
        for (int j = 0; j <= J; ++j) {
            out.S[j](q) = cs[j] * as[j];
            out.Kstar[j](q) = (j == 1) ? cplx(0.0) : ck[j] * ak[j];
        }
    }
    return out;
}

/// S^p_{dD,j}[phi] = S_{dD,j}[phi] / (lambda + 2 mu), componentwise.
inline VectorDensity series_Sp_j(const QuadratureSurface& s, const Medium& m, int j, const VectorDensity& phi) {
    detail::require_3d(s, "series_Sp_j");
    detail::require_order(j);
    const cplx c = detail::s_coef(j) / m.cp2();
    return layer::apply<3>(s, phi, [c, j](const Vec3& x, const Vec3&, const Vec3& y, const Vec3&, const auto& f) {
        const double r = (x - y).norm();
        return Eigen::Matrix<cplx, 1, 3>(c * std::pow(r, j - 1) * f);
    });
}

/// R_{1,j}[phi] = -(i^j (j-1) nu_x / (4 pi j!)) int r^(j-3) <x - y, phi(y)>.
inline VectorDensity r1_j(const QuadratureSurface& s, int j, const VectorDensity& phi) {
    detail::require_3d(s, "r1_j");
    detail::require_order(j);
    if (phi.rows() != s.size()) throw ShapeError("density length does not match the surface");
    if (j == 1) return VectorDensity::Zero(s.size(), 3);
    const cplx c = detail::k_coef(j);
    return layer::apply<3>(s, phi, [c, j](const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3&, const auto& f) {
        const Vec3 d = x - y;
        const double r = d.norm();
        const cplx proj = f(0) * d.x() + f(1) * d.y() + f(2) * d.z();
        return Eigen::Matrix<cplx, 1, 3>(c * std::pow(r, j - 3) * proj * nx.transpose().cast<cplx>());
    });
}

/// R_{2,j}[phi] = -(i^j (j-1)/(4 pi j!)) (int r^(j-3) <x-y, nu_x> phi + int r^(j-3) (x-y) <nu_x, phi>).
inline VectorDensity r2_j(const QuadratureSurface& s, int j, const VectorDensity& phi) {
    detail::require_3d(s, "r2_j");
    detail::require_order(j);
    if (phi.rows() != s.size()) throw ShapeError("density length does not match the surface");
    if (j == 1) return VectorDensity::Zero(s.size(), 3);
    const cplx c = detail::k_coef(j);
    return layer::apply<3>(s, phi, [c, j](const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3&, const auto& f) {
        const Vec3 d = x - y;
        const double r = d.norm();
        const cplx nphi = f(0) * nx.x() + f(1) * nx.y() + f(2) * nx.z();
        const Eigen::Matrix<cplx, 1, 3> v = d.dot(nx) * f + nphi * d.transpose().cast<cplx>();
        return Eigen::Matrix<cplx, 1, 3>(c * std::pow(r, j - 3) * v);
    });
}

/// K^{p,*}_{dD,j} = lambda/(lambda+2mu) R_{1,j} + mu/(lambda+2mu) R_{2,j}.
inline VectorDensity kp_star_j(const QuadratureSurface& s, const Medium& m, int j, const VectorDensity& phi) {
    const double a = m.lambda / m.cp2(), b = m.mu / m.cp2();
    VectorDensity out = VectorDensity::Zero(s.size(), 3);
    if (a != 0.0) out += a * r1_j(s, j, phi);
    if (b != 0.0) out += b * r2_j(s, j, phi);
    if (a == 0.0 && b == 0.0) detail::require_3d(s, "kp_star_j");
    return out;
}

/// All S_{dD,j}[phi], R_{1,j}[phi], R_{2,j}[phi] for a vector density, j = 0..J, in one pass.
struct SeriesVector {
    std::vector<VectorDensity> S;
    std::vector<VectorDensity> R1;
    std::vector<VectorDensity> R2;
};

inline SeriesVector series_vector_all(const QuadratureSurface& s, int J, const VectorDensity& phi) {
    detail::require_3d(s, "series_vector_all");
    detail::require_order(J);
    if (phi.rows() != s.size()) throw ShapeError("density length does not match the surface");
    std::array<cplx, max_series_order + 1> cs{}, ck{};
    for (int j = 0; j <= J; ++j) {
        cs[j] = detail::s_coef(j);
        ck[j] = detail::k_coef(j);
    }
    const int n = s.size();
    const layer::PaddedGrid<3> grid(s, phi);
    SeriesVector out;
    out.S.assign(J + 1, VectorDensity::Zero(n, 3));
    out.R1.assign(J + 1, VectorDensity::Zero(n, 3));
    out.R2.assign(J + 1, VectorDensity::Zero(n, 3));
    using Row = Eigen::Matrix<cplx, 1, 3>;
    for (int q = 0; q < n; ++q) {
        const layer::Target t = layer::node_target(s, q, s.ring_rules);
        // real-weighted sums; the complex coefficients are applied once per order
        std::array<std::array<cplx, 3>, max_series_order + 1> as{}, a2{};
        std::array<cplx, max_series_order + 1> a1{};
        const double nx0 = t.nx.x(), nx1 = t.nx.y(), nx2 = t.nx.z();
        auto add = [&](const Vec3& y, double w, const Row& f) {
            const double d0 = t.x.x() - y.x(), d1 = t.x.y() - y.y(), d2 = t.x.z() - y.z();
            const double r = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
            const cplx f0 = f(0), f1 = f(1), f2 = f(2);
            const cplx proj = f0 * d0 + f1 * d1 + f2 * d2;
            const cplx nphi = f0 * nx0 + f1 * nx1 + f2 * nx2;
            const double dn = d0 * nx0 + d1 * nx1 + d2 * nx2;
            const cplx v0 = dn * f0 + nphi * d0, v1 = dn * f1 + nphi * d1, v2 = dn * f2 + nphi * d2;
            double rp = w / r;               // w r^(j-1)
            double rq = w / (r * r * r);     // w r^(j-3)
            for (int j = 0; j <= J; ++j) {
                as[j][0] += rp * f0;
                as[j][1] += rp * f1;
                as[j][2] += rp * f2;
                a1[j] += rq * proj;
                a2[j][0] += rq * v0;
                a2[j][1] += rq * v1;
                a2[j][2] += rq * v2;
                rp *= r;
                rq *= r;
            }
        };
        layer::visit(
            s, t, [&](int r, const Vec3& y, const Vec3&, double w) { add(y, w, phi.row(r)); },
            [&](const LocalPoint& p, const Vec3& y, const Vec3&, double w) { add(y, w, grid.at(p, t.shift)); });
        for (int j = 0; j <= J; ++j) {
            for (int c = 0; c < 3; ++c) out.S[j](q, c) = cs[j] * as[j][c];
            if (j == 1) continue;
            for (int c = 0; c < 3; ++c) {
                out.R1[j](q, c) = ck[j] * a1[j] * t.nx[c];
                out.R2[j](q, c) = ck[j] * a2[j][c];
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lame s-wave single layer (exterior evaluation)

/// S^{omega,s}[phi](x) with kernel (1/(k^2 tau^2)) (k_s^2 I + grad grad) G^{k_s}(x - y).
inline Vec3c s_wave_exterior(const QuadratureSurface& s, const Medium& m, cplx k, const VectorDensity& phi,
                             const Vec3& x) {
    detail::require_finite(k);
    if (phi.rows() != s.size()) throw ShapeError("density length does not match the surface");
    if (k == cplx(0.0)) throw DomainError("s_wave_exterior: k must be nonzero");
    const cplx ks = m.k_s(k);
    const cplx pref = 1.0 / (k * k * m.tau * m.tau);
    const bool planar = s.dim == 2;
    const cplx I(0, 1);
    const auto row = layer::apply_exterior<3>(
        s, x, phi, [&](const Vec3& xx, const Vec3&, const Vec3& y, const Vec3&, const auto& f) {
            const Vec3 d = xx - y;
            const double r = d.norm();
            const Vec3 e = d / r;
            cplx g, g1, g2; // G, G', G''
            if (planar) {
                const cplx z = ks * r;
                const cplx h0 = specfun::hankel1_H(0, 0, z), h1 = specfun::hankel1_H(1, 0, z);
                g = -0.25 * I * h0;
                g1 = 0.25 * I * ks * h1;
                g2 = 0.25 * I * ks * ks * (h0 - h1 / z);
            } else {
                const cplx ikr = I * ks * r;
                const cplx ex = std::exp(ikr) * detail::inv4pi;
                g = -ex / r;
                g1 = -ex * (ikr - 1.0) / (r * r);
                g2 = -ex * (-ks * ks * r * r - 2.0 * ikr + 2.0) / (r * r * r);
            }
            const cplx ef = f(0) * e.x() + f(1) * e.y() + f(2) * e.z();
            const Eigen::Matrix<cplx, 1, 3> er = e.transpose().cast<cplx>();
            // (k_s^2 G I + G'' e e^T + (G'/r)(I - e e^T)) f
            const Eigen::Matrix<cplx, 1, 3> v = (ks * ks * g + g1 / r) * f + (g2 - g1 / r) * ef * er;
            return Eigen::Matrix<cplx, 1, 3>(pref * v);
        });
    return row.transpose();
}

// ---------------------------------------------------------------------------
// Block operator

/// A(k, delta)[Phi] with p-wave-reduced Lame blocks truncated at order J.
inline DensityPair assemble_block_apply(const QuadratureSurface& s, const Medium& m, cplx k, int J,
                                        const DensityPair& Phi) {
    detail::require_3d(s, "assemble_block_apply");
    detail::require_finite(k);
    detail::require_order(J);
    if (k == cplx(0.0)) throw DomainError("assemble_block_apply: k must be nonzero");
    const int n = s.size();
    if (Phi.scalar_part.size() != n || Phi.vector_part.rows() != n)
        throw ShapeError("density pair does not match the surface");
    const auto [Sb, Kb] = helm_single_and_np(s, k, Phi.scalar_part);
    const SeriesVector sv = series_vector_all(s, J, Phi.vector_part);
    const cplx kp = m.k_p(k);
    const double a = m.lambda / m.cp2(), b = m.mu / m.cp2();
    VectorDensity sp = VectorDensity::Zero(n, 3), kps = VectorDensity::Zero(n, 3);
    cplx pw = 1.0;
    for (int j = 0; j <= J; ++j) {
        sp += (pw / m.cp2()) * sv.S[j];
        kps += pw * (a * sv.R1[j] + b * sv.R2[j]);
        pw *= kp;
    }
    DensityPair out;
    out.scalar_part.resize(n);
    out.vector_part.resize(n, 3);
    const cplx inv_k2 = 1.0 / (k * k);
    const double dt2 = m.delta * m.tau * m.tau;
    for (int q = 0; q < n; ++q) {
        const Vec3c nu = s.normals[q].cast<cplx>();
        const cplx nsp = nu.x() * sp(q, 0) + nu.y() * sp(q, 1) + nu.z() * sp(q, 2);
        out.scalar_part(q) = inv_k2 * (-0.5 * Phi.scalar_part(q) + Kb(q)) - nsp;
        out.vector_part.row(q) = dt2 * Sb(q) * nu.transpose() + 0.5 * Phi.vector_part.row(q) + kps.row(q);
    }
    return out;
}

} // namespace minnaert
