#pragma once

// Weak resonances of a general 3D bubble: the low-frequency density
// construction Phi(k) = sum_j k^j (phi_j, c_j nu), the residual ||A(k) Phi||_H,
// and the enhanced-resonance conditions.
//
// The static operator M0 = -I/2 + K*_0 is discretized with a rank-one
// correction 1 g^T chosen so that w^T M0 = 0 holds exactly for the quadrature
// weights w. The continuous operator has this property (its range is the
// mean-zero subspace), and enforcing it discretely makes the compatibility
// constants c_j exact and the null vector of M0 exact. The same correction is
// added to K^{k,*} when A(k) is applied.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minnaert/error.hpp"
#include "minnaert/medium.hpp"
#include "minnaert/potentials.hpp"
#include "minnaert/radial.hpp"
#include "minnaert/surface.hpp"

namespace minnaert {

inline constexpr int max_construction_order = 6;
inline constexpr int default_truncation = 6;

/// Medium-independent data of a 3D surface: the corrected static operator,
/// its normalized null vector, and the series operators applied to nu.
class GeometryCache {
public:
    GeometryCache(const QuadratureSurface& s, int truncation = default_truncation) : surf_(&s), J_(truncation) {
        if (s.dim != 3) throw ConfigError("general-shape resonances are defined in three dimensions only");
        detail::require_order(std::max(truncation, 2));
        const int n = s.size();
        const Eigen::VectorXd& w = s.weights;
        {
            Eigen::MatrixXd bordered(n + 1, n + 1);
            bordered.topLeftCorner(n, n) = static_np_adjoint_matrix(s);
            auto m0 = bordered.topLeftCorner(n, n);
            m0.diagonal().array() -= 0.5;
            gauss_ = -(m0.transpose() * w) / w.sum();
            m0.rowwise() += gauss_.transpose();
            bordered.col(n).head(n).setOnes();
            bordered.row(n).head(n) = w.transpose();
            bordered(n, n) = 0.0;
            lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(bordered);
        }
        const double rcond = lu_->rcond();
        if (!(rcond > 1e-13))
            throw NumericalError("static Neumann-Poincare system is numerically singular",
                                 rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());

        Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
        e(n) = 1.0;
        const Eigen::VectorXd x = lu_->solve(e);
        const ScalarDensity xn = x.head(n).cast<cplx>();
        const ScalarDensity sx = helm_single_layer(s, 0.0, xn);
        const ScalarDensity one = ScalarDensity::Ones(n);
        const cplx alpha = integrate_scalar(s, sx.conjugate().cwiseProduct(one)) /
                           integrate_scalar(s, sx.conjugate().cwiseProduct(sx));
        phi0_ = alpha * xn;
        phi0_fit_ = l2_norm(s, ScalarDensity(alpha * sx - one)) / l2_norm(s, one);

        nu_ = normal_density(s);
        nu_series_ = series_vector_all(s, J_, nu_);
    }

    const QuadratureSurface& surface() const { return *surf_; }
    int truncation() const { return J_; }

    /// Static null density, scaled so that S_0[phi0] = 1 in the least-squares sense.
    const ScalarDensity& phi0() const { return phi0_; }
    /// Relative L2 misfit of S_0[phi0] = 1.
    double phi0_fit() const { return phi0_fit_; }
    const VectorDensity& nu() const { return nu_; }
    /// S_j[nu], R_{1,j}[nu], R_{2,j}[nu] for j = 0..truncation.
    const SeriesVector& nu_series() const { return nu_series_; }
    /// Rank-one correction row g of the static operator.
    const Eigen::VectorXd& gauss_row() const { return gauss_; }

    /// Solves M0 phi = rhs on the mean-zero subspace; returns phi (with w^T phi = 0)
    /// and the constant removed from rhs.
    std::pair<ScalarDensity, cplx> solve_static(const ScalarDensity& rhs) const {
        const int n = surf_->size();
        if (rhs.size() != n) throw ShapeError("density length does not match the surface");
        Eigen::VectorXd b(n + 1);
        b(n) = 0.0;
        b.head(n) = rhs.real();
        const Eigen::VectorXd xr = lu_->solve(b);
        b.head(n) = rhs.imag();
        const Eigen::VectorXd xi = lu_->solve(b);
        ScalarDensity phi(n);
        phi.real() = xr.head(n);
        phi.imag() = xi.head(n);
        return {phi, cplx(xr(n), xi(n))};
    }

private:
    const QuadratureSurface* surf_;
    int J_;
    Eigen::VectorXd gauss_;
    std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    ScalarDensity phi0_;
    double phi0_fit_ = 0.0;
    VectorDensity nu_;
    SeriesVector nu_series_;
};

struct ConstructionState {
    int order = 0;
    std::vector<ScalarDensity> phis; // phi_0 .. phi_{order+2}
    std::vector<cplx> cs;            // c_0 .. c_order
    std::vector<double> leakage;     // relative rhs mass removed by the mean-zero projection, per phi_j (j >= 2)
    std::vector<std::string> warnings;
    cplx c0_numerator, c0_denominator;
};

struct C0Report {
    cplx numerator;   // int K*_2[phi0] ds
    cplx denominator; // int nu . S^p_0[nu] ds
    cplx value;
};

/// Density construction and residual evaluation for one surface and medium.
class ResonanceModel {
public:
    ResonanceModel(std::shared_ptr<const GeometryCache> geo, const Medium& m, int order)
        : geo_(std::move(geo)), m_(m) {
        m_.validate();
        if (order < 0 || order > max_construction_order) throw ConfigError("construction order must be in 0..6");
        if (geo_->truncation() < order + 2) throw ConfigError("series truncation must be at least order + 2");
        build(order);
    }

    const ConstructionState& state() const { return st_; }
    const Medium& medium() const { return m_; }
    const GeometryCache& geometry() const { return *geo_; }

    /// Phi(k) = sum_j k^j (phi_j, c_j nu), normalized to unit H-norm.
    DensityPair density(cplx k) const {
        DensityPair p = raw_density(k);
        const double nrm = h_norm(geo_->surface(), p);
        if (!(nrm > 0.0)) throw NumericalError("constructed density vanishes");
        p.scalar_part /= nrm;
        p.vector_part /= nrm;
        return p;
    }

    /// A(k, delta)[Phi] for the normalized density Phi(k).
    DensityPair apply(cplx k) const {
        detail::require_finite(k);
        if (k == cplx(0.0)) throw DomainError("residual: k must be nonzero");
        const QuadratureSurface& s = geo_->surface();
        const int n = s.size();
        DensityPair phi = raw_density(k);
        const double nrm = h_norm(s, phi);
        if (!(nrm > 0.0)) throw NumericalError("constructed density vanishes");
        const ScalarDensity b1 = phi.scalar_part / nrm;
        const cplx c = poly(st_.cs, k) / nrm;
        const auto [sk, kk] = helm_single_and_np(s, k, b1);
        const cplx corr = (geo_->gauss_row().cast<cplx>().array() * b1.array()).sum();

        const SeriesVector& nv = geo_->nu_series();
        const cplx kp = m_.k_p(k);
        const double a = m_.lambda / m_.cp2(), b = m_.mu / m_.cp2();
        VectorDensity sp = VectorDensity::Zero(n, 3), kps = VectorDensity::Zero(n, 3);
        cplx pw = 1.0;
        for (int j = 0; j <= geo_->truncation(); ++j) {
            sp += (pw / m_.cp2()) * nv.S[j];
            kps += pw * (a * nv.R1[j] + b * nv.R2[j]);
            pw *= kp;
        }
        const VectorDensity& nu = geo_->nu();
        DensityPair out;
        out.scalar_part.resize(n);
        out.vector_part.resize(n, 3);
        const cplx inv_k2 = 1.0 / (k * k);
        const double dt2 = m_.delta * m_.tau * m_.tau;
        for (int q = 0; q < n; ++q) {
            const cplx nsp = nu(q, 0) * sp(q, 0) + nu(q, 1) * sp(q, 1) + nu(q, 2) * sp(q, 2);
            out.scalar_part(q) = inv_k2 * (-0.5 * b1(q) + kk(q) + corr) - c * nsp;
            out.vector_part.row(q) = dt2 * sk(q) * nu.row(q) + c * (0.5 * nu.row(q) + kps.row(q));
        }
        return out;
    }

    /// ||A(k, delta)[Phi]||_H with ||Phi||_H = 1.
    double residual(cplx k) const { return h_norm(geo_->surface(), apply(k)); }

    /// L2 norm of the order-m truncated strong-resonance condition at k.
    double higher_order_condition(cplx k) const {
        const QuadratureSurface& s = geo_->surface();
        const int n = s.size(), m = st_.order;
        const SeriesVector& nv = geo_->nu_series();
        const double cp2 = m_.cp2(), t2 = m_.tau * m_.tau;
        const cplx kt = k * m_.tau / m_.cp();
        ScalarDensity sum_s = ScalarDensity::Zero(n);
        cplx kj = 1.0;
        for (int j = 0; j <= m; ++j) {
            for (int i = 0; i <= j; ++i) sum_s += kj * scalar_series_[j - i].S[i];
            kj *= k;
        }
        VectorDensity lhs = m_.delta * t2 * (sum_s.asDiagonal() * geo_->nu());
        cplx ktj = 1.0;
        for (int j = 0; j <= m; ++j) {
            for (int i = 2; i <= j + 2; ++i) lhs += (k * k * t2 / cp2) * ktj * st_.cs[j + 2 - i] * nv.R1[i];
            for (int i = 0; i <= j; ++i)
                lhs += (m_.mu / cp2) * ktj * st_.cs[j - i] * (nv.R2[i] - 2.0 * nv.R1[i]);
            ktj *= kt;
        }
        return l2_norm(s, lhs);
    }

private:
    static cplx poly(const std::vector<cplx>& c, cplx k) {
        cplx v = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * k + *it;
        return v;
    }

    DensityPair raw_density(cplx k) const {
        const QuadratureSurface& s = geo_->surface();
        DensityPair p;
        p.scalar_part = ScalarDensity::Zero(s.size());
        cplx kj = 1.0;
        for (const ScalarDensity& f : st_.phis) {
            p.scalar_part += kj * f;
            kj *= k;
        }
        p.vector_part = poly(st_.cs, k) * geo_->nu();
        return p;
    }

    void build(int order) {
        const QuadratureSurface& s = geo_->surface();
        const int n = s.size();
        const SeriesVector& nv = geo_->nu_series();
        const VectorDensity& nu = geo_->nu();
        const double p = m_.tau / m_.cp();
        const int J = order + 2;

        // int nu . S^p_i[nu] ds and nu . S^p_i[nu] pointwise
        std::vector<ScalarDensity> nsp(order + 1);
        std::vector<cplx> int_nsp(order + 1);
        for (int i = 0; i <= order; ++i) {
            nsp[i] = (nu.array() * nv.S[i].array()).rowwise().sum() / m_.cp2();
            int_nsp[i] = integrate_scalar(s, nsp[i]);
        }
        if (std::abs(int_nsp[0]) < 1e-12 * s.weights.sum())
            throw NumericalError("degenerate geometry: int nu . S^p_0[nu] ds vanishes");

        st_ = ConstructionState{};
        st_.order = order;
        st_.phis.push_back(geo_->phi0());
        st_.phis.push_back(geo_->phi0());
        scalar_series_.clear();
        scalar_series_.push_back(series_scalar_all(s, J, geo_->phi0()));
        scalar_series_.push_back(scalar_series_[0]);

        for (int j = 0; j <= order; ++j) {
            // sum_{i=2}^{j+2} K*_i[phi_{j+2-i}]
            ScalarDensity ksum = ScalarDensity::Zero(n);
            for (int i = 2; i <= j + 2; ++i) ksum += scalar_series_[j + 2 - i].Kstar[i];
            cplx num = integrate_scalar(s, ksum);
            for (int i = 1; i <= j; ++i) num -= std::pow(p, i) * st_.cs[j - i] * int_nsp[i];
            const cplx cj = num / int_nsp[0];
            if (j == 0) {
                st_.c0_numerator = num;
                st_.c0_denominator = int_nsp[0];
            }
            st_.cs.push_back(cj);

            ScalarDensity src = ScalarDensity::Zero(n);
            for (int i = 0; i <= j; ++i) src += std::pow(p, i) * st_.cs[j - i] * nsp[i];
            const auto [phi, removed] = geo_->solve_static(ScalarDensity(src - ksum));
            // removed mass relative to the terms of the rhs (the rhs itself may cancel to noise)
            const double scale = l2_norm(s, src) + l2_norm(s, ksum);
            const double leak = scale > 0.0 ? std::abs(removed) * std::sqrt(s.weights.sum()) / scale : 0.0;
            st_.leakage.push_back(leak);
            if (leak > 0.1)
                st_.warnings.push_back("mean-zero projection removed " + std::to_string(leak) + " of the rhs at order " +
                                       std::to_string(j + 2));
            st_.phis.push_back(phi);
            if (j + 2 <= order) scalar_series_.push_back(series_scalar_all(s, J, phi));
        }
    }

    std::shared_ptr<const GeometryCache> geo_;
    Medium m_;
    ConstructionState st_;
    std::vector<SeriesScalar> scalar_series_; // S_i and K*_i applied to phi_l, l <= order
};

inline std::shared_ptr<const GeometryCache> make_geometry(const QuadratureSurface& s,
                                                          int truncation = default_truncation) {
    return std::make_shared<const GeometryCache>(s, truncation);
}

/// Phi(k) of order m normalized to unit H-norm, with the construction state.
inline std::pair<DensityPair, ConstructionState> construct_phi(const QuadratureSurface& s, const Medium& m, cplx k,
                                                               int order) {
    detail::require_finite(k);
    if (k == cplx(0.0)) throw DomainError("construct_phi: k must be nonzero");
    const ResonanceModel model(make_geometry(s, std::max(default_truncation, order + 2)), m, order);
    return {model.density(k), model.state()};
}

inline C0Report c0_value(const GeometryCache& geo, const Medium& m) {
    m.validate();
    const QuadratureSurface& s = geo.surface();
    C0Report r;
    const SeriesScalar ss = series_scalar_all(s, 2, geo.phi0());
    r.numerator = integrate_scalar(s, ss.Kstar[2]);
    const ScalarDensity nsp = (geo.nu().array() * geo.nu_series().S[0].array()).rowwise().sum() / m.cp2();
    r.denominator = integrate_scalar(s, nsp);
    if (std::abs(r.denominator) < 1e-12 * s.weights.sum())
        throw NumericalError("degenerate geometry: int nu . S^p_0[nu] ds vanishes");
    r.value = r.numerator / r.denominator;
    return r;
}

inline C0Report c0_value(const QuadratureSurface& s, const Medium& m) { return c0_value(GeometryCache(s, 2), m); }

inline double residual(const QuadratureSurface& s, const Medium& m, cplx k, int order) {
    const ResonanceModel model(make_geometry(s, std::max(default_truncation, order + 2)), m, order);
    return model.residual(k);
}

struct ScanRow {
    cplx k;
    double residual;
    double amplification; // 1 / residual
};

struct ScanResult {
    std::vector<ScanRow> rows;
    ScanRow minimizer;
    bool refined = false; // golden-section refinement applied
};

/// Residuals on a k grid; for real grids the minimizer is refined by golden-section search
/// between the neighbours of the grid minimum.
inline ScanResult residual_scan(const ResonanceModel& model, const std::vector<cplx>& grid, double rel_tol = 1e-4) {
    if (grid.empty()) throw ConfigError("residual scan needs a non-empty grid");
    ScanResult out;
    for (const cplx& k : grid) {
        const double r = model.residual(k);
        out.rows.push_back({k, r, 1.0 / r});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (out.rows[i].residual < out.rows[best].residual) best = i;
    out.minimizer = out.rows[best];
    const bool real_grid = std::all_of(grid.begin(), grid.end(), [](cplx k) { return k.imag() == 0.0; });
    if (!real_grid || grid.size() < 3) return out;
    double lo = grid[best == 0 ? 0 : best - 1].real();
    double hi = grid[best + 1 == grid.size() ? best : best + 1].real();
    if (lo > hi) std::swap(lo, hi);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = model.residual(x1), f2 = model.residual(x2);
    while (hi - lo > rel_tol * std::abs(out.minimizer.k)) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = model.residual(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = model.residual(x2);
        }
    }
    const double xm = f1 < f2 ? x1 : x2;
    const double fm = std::min(f1, f2);
    if (fm < out.minimizer.residual) out.minimizer = {xm, fm, 1.0 / fm};
    out.refined = true;
    return out;
}

inline ScanResult residual_scan(const QuadratureSurface& s, const Medium& m, const std::vector<cplx>& grid,
                                int order) {
    const ResonanceModel model(make_geometry(s, std::max(default_truncation, order + 2)), m, order);
    return residual_scan(model, grid);
}

struct EnhancedReport {
    double tangential_fraction = 0.0;
    bool solvable = false;
    std::pair<cplx, cplx> k_roots;
    // coefficients of nu in the projected condition a0 + a1 + k^2 a2 = 0
    cplx a0, a1, a2;
};

inline constexpr double tangential_threshold = 0.02;

/// Decomposes R_{2,0}[nu] into normal and tangential parts and solves the leading-order
/// enhanced-resonance condition for k.
inline EnhancedReport enhanced_condition(const GeometryCache& geo, const Medium& m) {
    m.validate();
    const QuadratureSurface& s = geo.surface();
    const int n = s.size();
    const VectorDensity& nu = geo.nu();
    const SeriesVector& nv = geo.nu_series();
    const double cp2 = m.cp2(), t2 = m.tau * m.tau;
    const cplx c0 = c0_value(geo, m).value;

    EnhancedReport r;
    const VectorDensity& a = nv.R2[0];
    const ScalarDensity an = (a.array() * nu.array()).rowwise().sum();
    const VectorDensity tang = a - an.asDiagonal() * nu;
    r.tangential_fraction = l2_norm(s, tang) / l2_norm(s, a);
    r.solvable = r.tangential_fraction < tangential_threshold;

    const VectorDensity f0 = m.delta * t2 * nu + (m.mu / cp2) * c0 * (nv.R2[0] - 2.0 * nv.R1[0]);
    const VectorDensity f2 = (t2 / cp2) * c0 * nv.R1[2];
    const double area = s.weights.sum();
    auto mean_normal = [&](const VectorDensity& v) {
        return integrate_scalar(s, ScalarDensity((v.array() * nu.array()).rowwise().sum())) / area;
    };
    r.a0 = m.delta * t2;
    r.a1 = mean_normal(f0) - r.a0;
    r.a2 = mean_normal(f2);
    cplx k2;
    if (r.solvable) {
        if (std::abs(r.a2) < 1e-14) throw NumericalError("degenerate projected condition: zero k^2 coefficient");
        k2 = -(r.a0 + r.a1) / r.a2;
    } else {
        cplx f2f0 = 0.0;
        double f2f2 = 0.0;
        for (int q = 0; q < n; ++q)
            for (int c = 0; c < 3; ++c) {
                f2f0 += s.weights[q] * std::conj(f2(q, c)) * f0(q, c);
                f2f2 += s.weights[q] * std::norm(f2(q, c));
            }
        if (!(f2f2 > 0.0)) throw NumericalError("degenerate condition: R_{1,2}[nu] vanishes");
        k2 = -f2f0 / f2f2;
    }
    cplx k = std::sqrt(k2);
    if (k.real() < 0.0) k = -k;
    r.k_roots = {k, -k};
    return r;
}

inline EnhancedReport enhanced_condition(const QuadratureSurface& s, const Medium& m) {
    return enhanced_condition(GeometryCache(s, 2), m);
}

inline double higher_order_condition(const QuadratureSurface& s, const Medium& m, cplx k, int order) {
    const ResonanceModel model(make_geometry(s, std::max(default_truncation, order + 2)), m, order);
    return model.higher_order_condition(k);
}

/// Boundary data F = (nu . u, -traction of u) of the plane p-wave u = d exp(i k_p d.x).
inline DensityPair incident_p_plane(const QuadratureSurface& s, const Medium& m, cplx k, const Vec3& d) {
    m.validate();
    detail::require_finite(k);
    if (std::abs(d.norm() - 1.0) > 1e-12) throw DomainError("direction must be a unit vector");
    const cplx kp = m.k_p(k);
    const cplx I(0, 1);
    const int n = s.size();
    DensityPair f;
    f.scalar_part.resize(n);
    f.vector_part.resize(n, 3);
    for (int q = 0; q < n; ++q) {
        const Vec3& x = s.nodes[q];
        const Vec3& nu = s.normals[q];
        const cplx e = std::exp(I * kp * d.dot(x));
        const double dn = d.dot(nu);
        f.scalar_part(q) = dn * e;
        // div u = i k_p e, sym grad u nu = i k_p e d (d . nu)
        const Vec3c t = (I * kp * e) * (m.lambda * nu + 2.0 * m.mu * dn * d).cast<cplx>();
        f.vector_part.row(q) = -t.transpose();
    }
    return f;
}

} // namespace minnaert
