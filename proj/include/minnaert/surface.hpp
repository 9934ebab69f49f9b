#pragma once

// Closed surfaces with product quadrature.
//
// 3D shapes are linear images X = diag(a, b, c) u of the unit sphere. Nodes
// sit on a Gauss-Legendre grid in cos(theta) times a uniform grid in phi.
// Every node ring also carries a local polar rule used to integrate kernels
// that are singular at the target node (see layer_quadrature.hpp).
//
// The 2D shape is the unit circle with 2n equispaced nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minnaert/error.hpp"
#include "minnaert/quadrature.hpp"

namespace minnaert {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using ScalarDensity = Eigen::VectorXcd;
using VectorDensity = Eigen::Matrix<cplx, Eigen::Dynamic, 3>;

struct DensityPair {
    ScalarDensity scalar_part;
    VectorDensity vector_part;
};

enum class ShapeKind { unit_sphere, ellipsoid, unit_circle };

inline std::string to_string(ShapeKind k) {
    switch (k) {
    case ShapeKind::unit_sphere: return "unit_sphere";
    case ShapeKind::ellipsoid: return "ellipsoid";
    case ShapeKind::unit_circle: return "unit_circle";
    }
    return "unknown";
}

/// Parameters of the local polar rule around each target node.
struct SingularParams {
    double patch_radius = std::numbers::pi; // on the parameter sphere
    int n_rho = 24;
    int n_alpha = 48;
    int stencil = 8;
};

struct ShapeDescriptor {
    ShapeKind kind = ShapeKind::unit_sphere;
    std::array<double, 3> semi_axes{1.0, 1.0, 1.0};
    int n_theta = 40;
    int n_phi = 80;
    int n = 64; // unit circle
    SingularParams singular{};

    static ShapeDescriptor sphere(int n_theta = 40, int n_phi = 80) {
        ShapeDescriptor d;
        d.n_theta = n_theta;
        d.n_phi = n_phi;
        return d;
    }
    static ShapeDescriptor ellipsoid(double a, double b, double c, int n_theta = 40, int n_phi = 80) {
        ShapeDescriptor d;
        d.kind = ShapeKind::ellipsoid;
        d.semi_axes = {a, b, c};
        d.n_theta = n_theta;
        d.n_phi = n_phi;
        return d;
    }
    static ShapeDescriptor circle(int n = 64) {
        ShapeDescriptor d;
        d.kind = ShapeKind::unit_circle;
        d.n = n;
        return d;
    }
};

inline constexpr int max_stencil = 10;

/// A point of a local polar rule, expressed for a target at azimuth 0.
struct LocalPoint {
    Vec3 u;     // point on the parameter sphere
    double w;   // rho/alpha weight times sin(rho) times the cutoff
    int th0;    // first extended theta row of the interpolation stencil
    int ph0;    // first azimuth index of the stencil in [0, n_phi), before shifting by the target
    std::array<double, max_stencil> cth{};
    std::array<double, max_stencil> cph{};
};

struct LocalRule {
    std::vector<LocalPoint> points;
};

class QuadratureSurface {
public:
    int dim = 3;
    ShapeDescriptor descriptor;
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals;
    Eigen::VectorXd weights;

    // 3D parametrization data
    int n_theta = 0, n_phi = 0;
    Vec3 axes{1.0, 1.0, 1.0};
    std::vector<double> theta;    // ascending polar angles
    std::vector<double> gl_weight; // Gauss-Legendre weights in cos(theta)
    std::vector<Vec3> param;      // unit-sphere preimage of each node
    double cutoff = 0.0;          // local patch radius on the parameter sphere
    int stencil = 0;
    std::vector<LocalRule> ring_rules;
    // ring_far[i][i' n_phi + (j' - j mod n_phi)]: smooth-part factor 1 - chi for target (i, j)
    std::vector<std::vector<double>> ring_far;

    int size() const { return static_cast<int>(nodes.size()); }
    int index(int i, int j) const { return i * n_phi + j; }

    Vec3 map(const Vec3& u) const { return axes.cwiseProduct(u); }
    Vec3 normal_at(const Vec3& u) const { return u.cwiseQuotient(axes).normalized(); }
    double jacobian(const Vec3& u) const {
        return axes.prod() * u.cwiseQuotient(axes).norm();
    }

    /// Polar angle of extended theta row e (rows beyond the poles are mirrored).
    double extended_theta(int e) const {
        if (e < 0) return -theta[-e - 1];
        if (e >= n_theta) return 2.0 * std::numbers::pi - theta[2 * n_theta - 1 - e];
        return theta[e];
    }
    /// Real row and azimuth shift of extended row e.
    void extended_row(int e, int& row, int& shift) const {
        if (e < 0) { row = -e - 1; shift = n_phi / 2; }
        else if (e >= n_theta) { row = 2 * n_theta - 1 - e; shift = n_phi / 2; }
        else { row = e; shift = 0; }
    }

    /// Local polar rule centered at parameter point (theta_c, phi_c). With eps > 0 the
    /// radial nodes are graded as eps * sinh(s) to resolve a target at distance eps.
    LocalRule build_local_rule(double theta_c, double phi_c, double eps = 0.0) const;
};

namespace detail {

inline Vec3 sphere_point(double th, double ph) {
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

inline void validate(const ShapeDescriptor& d) {
    if (d.kind == ShapeKind::unit_circle) {
        if (d.n < 4 || d.n % 2 != 0)
            throw ConfigError("unit_circle resolution must be even and at least 4");
        return;
    }
    if (d.n_theta < 4 || d.n_phi < 4)
        throw ConfigError("surface resolution must be at least 4 in each direction");
    if (d.n_phi % 2 != 0) throw ConfigError("n_phi must be even");
    for (double a : d.semi_axes)
        if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("semi-axes must be positive");
    const auto& s = d.singular;
    if (s.stencil < 2 || s.stencil > max_stencil || s.stencil > d.n_theta || s.stencil > d.n_phi)
        throw ConfigError("interpolation stencil size out of range");
    if (s.n_rho < 2 || s.n_alpha < 4 || s.n_alpha % 2 != 0 || !(s.patch_radius > 0.0) ||
        s.patch_radius > std::numbers::pi)
        throw ConfigError("invalid local rule parameters");
}

} // namespace detail

inline LocalRule QuadratureSurface::build_local_rule(double theta_c, double phi_c, double eps) const {
    using std::numbers::pi;
    const auto& sp = descriptor.singular;
    const int s = stencil;
    const Vec3 uc = detail::sphere_point(theta_c, phi_c);
    const Vec3 et(std::cos(theta_c) * std::cos(phi_c), std::cos(theta_c) * std::sin(phi_c), -std::sin(theta_c));
    const Vec3 ep(-std::sin(phi_c), std::cos(phi_c), 0.0);
    const double dphi = 2.0 * pi / n_phi;

    std::vector<double> rho, wrho;
    if (eps > 0.0) {
        const quad::Rule r = quad::gauss_legendre(sp.n_rho, 0.0, std::asinh(cutoff / eps));
        for (int a = 0; a < sp.n_rho; ++a) {
            rho.push_back(eps * std::sinh(r.nodes[a]));
            wrho.push_back(r.weights[a] * eps * std::cosh(r.nodes[a]));
        }
    } else {
        const quad::Rule r = quad::gauss_legendre(sp.n_rho, 0.0, cutoff);
        rho = r.nodes;
        wrho = r.weights;
    }

    std::vector<double> ext(n_theta + 2 * s);
    for (int e = -s; e < n_theta + s; ++e) ext[e + s] = extended_theta(e);

    LocalRule rule;
    rule.points.reserve(rho.size() * sp.n_alpha);
    const double walpha = 2.0 * pi / sp.n_alpha;
    for (std::size_t a = 0; a < rho.size(); ++a) {
        const double chi = quad::partition_of_unity(rho[a] / cutoff);
        for (int m = 0; m < sp.n_alpha; ++m) {
            const double alpha = walpha * m;
            LocalPoint p;
            p.u = std::cos(rho[a]) * uc + std::sin(rho[a]) * (std::cos(alpha) * et + std::sin(alpha) * ep);
            p.u.normalize();
            p.w = wrho[a] * walpha * std::sin(rho[a]) * chi;
            const double th = std::acos(std::clamp(p.u.z(), -1.0, 1.0));
            double ph = std::atan2(p.u.y(), p.u.x());
            // theta stencil on the extended rows
            int e = static_cast<int>(std::upper_bound(ext.begin(), ext.end(), th) - ext.begin()) - 1 - s;
            p.th0 = e - s / 2 + 1;
            quad::lagrange_weights(&ext[p.th0 + s], s, th, p.cth.data());
            // azimuth stencil relative to phi_c rounded to the grid
            double rel = ph / dphi;
            const int b = static_cast<int>(std::floor(rel));
            const int first = b - s / 2 + 1;
            double xs[max_stencil];
            for (int k = 0; k < s; ++k) xs[k] = first + k;
            quad::lagrange_weights(xs, s, rel, p.cph.data());
            p.ph0 = ((first % n_phi) + n_phi) % n_phi;
            rule.points.push_back(p);
        }
    }
    return rule;
}

/// Builds the quadrature surface described by d.
inline QuadratureSurface build_surface(const ShapeDescriptor& d) {
    using std::numbers::pi;
    detail::validate(d);
    QuadratureSurface s;
    s.descriptor = d;
    if (d.kind == ShapeKind::unit_circle) {
        s.dim = 2;
        s.nodes.resize(d.n);
        s.normals.resize(d.n);
        s.weights = Eigen::VectorXd::Constant(d.n, 2.0 * pi / d.n);
        for (int j = 0; j < d.n; ++j) {
            const double t = 2.0 * pi * j / d.n;
            s.nodes[j] = Vec3(std::cos(t), std::sin(t), 0.0);
            s.normals[j] = s.nodes[j];
        }
        return s;
    }
    s.dim = 3;
    s.n_theta = d.n_theta;
    s.n_phi = d.n_phi;
    if (d.kind == ShapeKind::ellipsoid) s.axes = Vec3(d.semi_axes[0], d.semi_axes[1], d.semi_axes[2]);
    const quad::Rule gl = quad::gauss_legendre(d.n_theta);
    s.theta.resize(d.n_theta);
    s.gl_weight.resize(d.n_theta);
    for (int i = 0; i < d.n_theta; ++i) {
        s.theta[i] = std::acos(-gl.nodes[i]);
        s.gl_weight[i] = gl.weights[i];
    }
    const int n = d.n_theta * d.n_phi;
    s.nodes.resize(n);
    s.normals.resize(n);
    s.param.resize(n);
    s.weights.resize(n);
    const double dphi = 2.0 * pi / d.n_phi;
    for (int i = 0; i < d.n_theta; ++i)
        for (int j = 0; j < d.n_phi; ++j) {
            const int q = s.index(i, j);
            const Vec3 u = detail::sphere_point(s.theta[i], dphi * j);
            s.param[q] = u;
            s.nodes[q] = s.map(u);
            s.normals[q] = s.normal_at(u);
            s.weights[q] = s.gl_weight[i] * dphi * s.jacobian(u);
        }
    s.cutoff = d.singular.patch_radius;
    s.stencil = d.singular.stencil;
    s.ring_rules.reserve(d.n_theta);
    s.ring_far.assign(d.n_theta, std::vector<double>(n, 1.0));
    for (int i = 0; i < d.n_theta; ++i) {
        s.ring_rules.push_back(s.build_local_rule(s.theta[i], 0.0));
        const Vec3& uc = s.param[s.index(i, 0)];
        for (int q = 0; q < n; ++q) {
            const Vec3& u = s.param[q];
            const double psi = std::atan2(uc.cross(u).norm(), uc.dot(u));
            if (psi < s.cutoff) s.ring_far[i][q] = 1.0 - quad::partition_of_unity(psi / s.cutoff);
        }
    }
    return s;
}

/// Quadrature sum of nodal values (scalar or vector rows).
template <class Derived>
auto integrate(const QuadratureSurface& surf, const Eigen::MatrixBase<Derived>& values) {
    if (values.rows() != surf.size()) throw ShapeError("integrate: length mismatch");
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out = surf.weights.cast<Scalar>().transpose() * values;
    return out;
}

inline cplx integrate_scalar(const QuadratureSurface& surf, const ScalarDensity& values) {
    if (values.size() != surf.size()) throw ShapeError("integrate: length mismatch");
    return (surf.weights.cast<cplx>().array() * values.array()).sum();
}

inline Vec3c integrate_vector(const QuadratureSurface& surf, const VectorDensity& values) {
    if (values.rows() != surf.size()) throw ShapeError("integrate: length mismatch");
    return (values.transpose() * surf.weights.cast<cplx>());
}

/// Discrete inner product on L2 x L2^N, conjugate-linear in the first argument.
inline cplx h_inner(const QuadratureSurface& surf, const DensityPair& a, const DensityPair& b) {
    const int n = surf.size();
    if (a.scalar_part.size() != n || b.scalar_part.size() != n || a.vector_part.rows() != n ||
        b.vector_part.rows() != n)
        throw ShapeError("h_inner: density does not match the surface");
    const Eigen::VectorXcd w = surf.weights.cast<cplx>();
    cplx s = (a.scalar_part.conjugate().array() * b.scalar_part.array() * w.array()).sum();
    for (int c = 0; c < 3; ++c)
        s += (a.vector_part.col(c).conjugate().array() * b.vector_part.col(c).array() * w.array()).sum();
    return s;
}

inline double h_norm(const QuadratureSurface& surf, const DensityPair& a) {
    return std::sqrt(std::max(0.0, h_inner(surf, a, a).real()));
}

inline double l2_norm(const QuadratureSurface& surf, const ScalarDensity& f) {
    return std::sqrt((surf.weights.array() * f.array().abs2()).sum());
}

inline double l2_norm(const QuadratureSurface& surf, const VectorDensity& f) {
    return std::sqrt((surf.weights.array() * f.rowwise().squaredNorm().array()).sum());
}

/// Outward normals as a complex vector density.
inline VectorDensity normal_density(const QuadratureSurface& surf) {
    VectorDensity v(surf.size(), 3);
    for (int q = 0; q < surf.size(); ++q) v.row(q) = surf.normals[q].cast<cplx>().transpose();
    return v;
}

inline DensityPair zero_pair(const QuadratureSurface& surf) {
    return {ScalarDensity::Zero(surf.size()), VectorDensity::Zero(surf.size(), 3)};
}

} // namespace minnaert
