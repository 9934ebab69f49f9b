#pragma once

// Nystrom evaluation of boundary integrals with kernels singular at the target.
//
// The integral over the parameter sphere is split with a smooth cutoff chi of
// the angular distance to the target's preimage. The smooth remainder (1 - chi)
// uses the global product rule; the chi part uses the surface's local polar rule
// with densities interpolated from the grid. Kernels are never evaluated at
// coincident points, so every kernel is discretized by the same linear rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "minnaert/error.hpp"
#include "minnaert/surface.hpp"

namespace minnaert::layer {

/// A target point: position, normal, parameter-sphere center of the local
/// rule, the local rule itself, and the rotation/azimuth shift that maps the
/// rule onto the center.
struct Target {
    Vec3 x;
    Vec3 nx;
    Vec3 uc;
    const LocalRule* rule = nullptr;
    double rot = 0.0;
    int shift = 0;
    int ring = -1; // node ring whose smooth-part factors apply, or -1 to compute them
};

inline Target node_target(const QuadratureSurface& s, int q, const std::vector<LocalRule>& rules, double offset = 0.0) {
    const int i = q / s.n_phi, j = q % s.n_phi;
    Target t;
    t.x = s.nodes[q] + offset * s.normals[q];
    t.nx = s.normals[q];
    t.uc = s.param[q];
    t.rule = &rules[i];
    t.rot = 2.0 * std::numbers::pi * j / s.n_phi;
    t.shift = j;
    t.ring = i;
    return t;
}

/// Grid density padded with mirrored rows beyond the poles and wrapped
/// azimuth columns, so a stencil is a contiguous block.
template <int Cols>
class PaddedGrid {
public:
    using Row = Eigen::Matrix<cplx, 1, Cols>;

    template <class Derived>
    PaddedGrid(const QuadratureSurface& s, const Eigen::MatrixBase<Derived>& f)
        : s_(s.stencil), n_phi_(s.n_phi), width_(s.n_phi + s.stencil),
          data_(static_cast<std::size_t>(s.n_theta + 2 * s.stencil) * width_ * Cols) {
        for (int e = -s_; e < s.n_theta + s_; ++e) {
            int row, extra;
            s.extended_row(e, row, extra);
            for (int c = 0; c < width_; ++c) {
                const int q = row * n_phi_ + (c + extra) % n_phi_;
                cplx* dst = &data_[(static_cast<std::size_t>(e + s_) * width_ + c) * Cols];
                for (int k = 0; k < Cols; ++k) dst[k] = f(q, k);
            }
        }
    }

    Row at(const LocalPoint& p, int shift) const {
        int col = p.ph0 + shift;
        if (col >= n_phi_) col -= n_phi_;
        std::array<cplx, Cols> acc{};
        for (int a = 0; a < s_; ++a) {
            const cplx* src = &data_[(static_cast<std::size_t>(p.th0 + a + s_) * width_ + col) * Cols];
            std::array<cplx, Cols> line{};
            for (int b = 0; b < s_; ++b)
                for (int k = 0; k < Cols; ++k) line[k] += p.cph[b] * src[b * Cols + k];
            for (int k = 0; k < Cols; ++k) acc[k] += p.cth[a] * line[k];
        }
        Row out;
        for (int k = 0; k < Cols; ++k) out(k) = acc[k];
        return out;
    }

private:
    int s_, n_phi_, width_;
    std::vector<cplx> data_;
};

/// Adds coeff times the interpolation functional of p to a matrix row.
template <class RowRef, class T>
void scatter(const QuadratureSurface& s, const LocalPoint& p, int shift, T coeff, RowRef&& row) {
    const int n_phi = s.n_phi;
    for (int a = 0; a < s.stencil; ++a) {
        int r, extra;
        s.extended_row(p.th0 + a, r, extra);
        int col = (p.ph0 + shift + extra) % n_phi;
        if (col < 0) col += n_phi;
        const int base = r * n_phi;
        const T ca = coeff * p.cth[a];
        for (int b = 0; b < s.stencil; ++b) {
            row(base + col) += ca * p.cph[b];
            if (++col == n_phi) col = 0;
        }
    }
}

/// Calls far(q, y, ny, w) for every grid node with a nonzero smooth weight and
/// local(p, y, ny, w) for every point of the target's local rule.
template <class Far, class Local>
void visit(const QuadratureSurface& s, const Target& t, Far&& far, Local&& local) {
    const double cos_cut = std::cos(s.cutoff);
    const int n = s.size();
    if (t.ring >= 0) {
        const double* fac = s.ring_far[t.ring].data();
        for (int i = 0, q = 0; i < s.n_theta; ++i) {
            const int base = i * s.n_phi;
            for (int j = 0; j < s.n_phi; ++j, ++q) {
                int dj = j - t.shift;
                if (dj < 0) dj += s.n_phi;
                const double w = s.weights[q] * fac[base + dj];
                if (w != 0.0) far(q, s.nodes[q], s.normals[q], w);
            }
        }
    }
    for (int q = 0; t.ring < 0 && q < n; ++q) {
        const Vec3& u = s.param[q];
        const double c = t.uc.dot(u);
        double w = s.weights[q];
        if (c > cos_cut) {
            const double psi = std::atan2(t.uc.cross(u).norm(), c);
            w *= 1.0 - quad::partition_of_unity(psi / s.cutoff);
            if (w == 0.0) continue;
        }
        far(q, s.nodes[q], s.normals[q], w);
    }
    const double cr = std::cos(t.rot), sr = std::sin(t.rot);
    for (const LocalPoint& p : t.rule->points) {
        const Vec3 u(cr * p.u.x() - sr * p.u.y(), sr * p.u.x() + cr * p.u.y(), p.u.z());
        local(p, s.map(u), s.normal_at(u), p.w * s.jacobian(u));
    }
}

/// Applies an integral operator to a density: out(t) = sum_sources kernel(x, nx, y, ny, f(y)) w.
/// The kernel receives the density as a row (1 x cols) and returns a row of out_cols entries.
template <int OutCols, class Derived, class Kernel>
Eigen::Matrix<cplx, Eigen::Dynamic, OutCols> apply_at(const QuadratureSurface& s, const std::vector<Target>& targets,
                                                     const Eigen::MatrixBase<Derived>& f, Kernel&& kernel) {
    if (f.rows() != s.size()) throw ShapeError("density length does not match the surface");
    using OutRow = Eigen::Matrix<cplx, 1, OutCols>;
    const PaddedGrid<Derived::ColsAtCompileTime> grid(s, f);
    Eigen::Matrix<cplx, Eigen::Dynamic, OutCols> out(static_cast<int>(targets.size()), OutCols);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const Target& t = targets[k];
        OutRow acc = OutRow::Zero();
        visit(
            s, t,
            [&](int q, const Vec3& y, const Vec3& ny, double w) { acc += w * kernel(t.x, t.nx, y, ny, f.row(q)); },
            [&](const LocalPoint& p, const Vec3& y, const Vec3& ny, double w) {
                acc += w * kernel(t.x, t.nx, y, ny, grid.at(p, t.shift));
            });
        out.row(static_cast<int>(k)) = acc;
    }
    return out;
}

inline std::vector<Target> node_targets(const QuadratureSurface& s) {
    std::vector<Target> ts;
    ts.reserve(s.size());
    for (int q = 0; q < s.size(); ++q) ts.push_back(node_target(s, q, s.ring_rules));
    return ts;
}

template <int OutCols, class Derived, class Kernel>
Eigen::Matrix<cplx, Eigen::Dynamic, OutCols> apply(const QuadratureSurface& s, const Eigen::MatrixBase<Derived>& f,
                                                  Kernel&& kernel) {
    return apply_at<OutCols>(s, node_targets(s), f, kernel);
}

/// Dense matrix of a scalar kernel k(x, nx, y, ny) on the node set.
template <class T, class Kernel>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> assemble(const QuadratureSurface& s, Kernel&& kernel) {
    const int n = s.size();
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    // column-major: assemble the transpose row by row for contiguous writes
    for (int q = 0; q < n; ++q) {
        const Target t = node_target(s, q, s.ring_rules);
        auto col = m.col(q);
        visit(
            s, t, [&](int r, const Vec3& y, const Vec3& ny, double w) { col(r) += w * kernel(t.x, t.nx, y, ny); },
            [&](const LocalPoint& p, const Vec3& y, const Vec3& ny, double w) {
                scatter(s, p, t.shift, T(w * kernel(t.x, t.nx, y, ny)), col);
            });
    }
    m.transposeInPlace();
    return m;
}

/// Rules graded toward a target at normal offset h from each node ring.
inline std::vector<LocalRule> offset_rules(const QuadratureSurface& s, double h) {
    std::vector<LocalRule> rules;
    rules.reserve(s.n_theta);
    const double eps = h / s.axes.maxCoeff();
    for (int i = 0; i < s.n_theta; ++i) rules.push_back(s.build_local_rule(s.theta[i], 0.0, eps));
    return rules;
}

/// Closest point on the surface to an exterior point x, as a parameter-sphere point.
inline Vec3 closest_parameter(const QuadratureSurface& s, const Vec3& x) {
    const Vec3 a2 = s.axes.cwiseProduct(s.axes);
    double t = 0.0;
    for (int it = 0; it < 200; ++it) {
        double f = -1.0, df = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = a2[c] + t;
            const double g = a2[c] * x[c] * x[c] / (d * d);
            f += g;
            df -= 2.0 * g / d;
        }
        if (df == 0.0) break;
        const double step = f / df;
        t -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
    }
    Vec3 y;
    for (int c = 0; c < 3; ++c) y[c] = a2[c] * x[c] / (a2[c] + t);
    Vec3 u = y.cwiseQuotient(s.axes);
    return u.normalized();
}

/// True if x lies strictly outside the surface.
inline bool is_exterior(const QuadratureSurface& s, const Vec3& x) {
    if (s.dim == 2) return x.head<2>().norm() > 1.0 + 1e-12;
    return x.cwiseQuotient(s.axes).squaredNorm() > 1.0 + 1e-12;
}

/// Applies a kernel at one exterior point, with a graded local rule when the point is near the surface.
template <int OutCols, class Derived, class Kernel>
Eigen::Matrix<cplx, 1, OutCols> apply_exterior(const QuadratureSurface& s, const Vec3& x,
                                               const Eigen::MatrixBase<Derived>& f, Kernel&& kernel) {
    if (!is_exterior(s, x)) throw DomainError("evaluation point is not outside the surface");
    using OutRow = Eigen::Matrix<cplx, 1, OutCols>;
    OutRow acc = OutRow::Zero();
    const Vec3 nx = Vec3::Zero();
    if (s.dim == 2) {
        for (int q = 0; q < s.size(); ++q) acc += s.weights[q] * kernel(x, nx, s.nodes[q], s.normals[q], f.row(q));
        return acc;
    }
    const Vec3 uc = closest_parameter(s, x);
    const double dist = (x - s.map(uc)).norm();
    if (dist > 10.0 * std::numbers::pi / s.n_theta * s.axes.maxCoeff()) {
        for (int q = 0; q < s.size(); ++q) acc += s.weights[q] * kernel(x, nx, s.nodes[q], s.normals[q], f.row(q));
        return acc;
    }
    const double th = std::acos(std::clamp(uc.z(), -1.0, 1.0));
    const double ph = std::atan2(uc.y(), uc.x());
    const LocalRule rule = s.build_local_rule(th, ph, dist / s.axes.maxCoeff());
    Target t;
    t.x = x;
    t.nx = nx;
    t.uc = uc;
    t.rule = &rule;
    const PaddedGrid<Derived::ColsAtCompileTime> grid(s, f);
    visit(
        s, t, [&](int q, const Vec3& y, const Vec3& ny, double w) { acc += w * kernel(x, nx, y, ny, f.row(q)); },
        [&](const LocalPoint& p, const Vec3& y, const Vec3& ny, double w) {
            acc += w * kernel(x, nx, y, ny, grid.at(p, 0));
        });
    return acc;
}

} // namespace minnaert::layer
