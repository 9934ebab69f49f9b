// Resonance of a gas bubble of radius 1 mm in a soft gel: exact ball root, asymptotic root,
// and the residual of the general construction at the asymptotic root.

#include <cstdio>

#include "minnaert/general.hpp"
#include "minnaert/radial.hpp"

int main() {
    using namespace minnaert;
    DimensionalMedium air_in_gel;
    air_in_gel.rho_b = 1.2;
    air_in_gel.rho_e = 1000.0;
    air_in_gel.kappa = 1.4e5;
    air_in_gel.lambda_t = 2.2e9;
    air_in_gel.mu_t = 1.0e4;
    air_in_gel.L = 1e-3;
    const Medium m = nondimensionalize(air_in_gel);
    std::printf("delta = %.4g, mu = %.4g, lambda = %.6f, tau = %.4g\n", m.delta, m.mu, m.lambda, m.tau);

    const cplx k_asym = asymptotic_root_3d(m).k_plus;
    const ResonanceResult exact = find_root(3, m, k_asym);
    std::printf("exact root      k = %.8f%+.8fi (%d iterations)\n", exact.k_root.real(), exact.k_root.imag(),
                exact.iterations);
    std::printf("asymptotic root k = %.8f%+.8fi\n", k_asym.real(), k_asym.imag());
    const cplx omega = dimensional_frequency(air_in_gel, exact.k_root);
    std::printf("frequency %.2f Hz, decay rate %.2f 1/s\n", omega.real() / (2 * std::numbers::pi), -omega.imag());

    const QuadratureSurface s = build_surface(ShapeDescriptor::sphere(20, 40));
    const ResonanceModel model(make_geometry(s), m, 2);
    std::printf("construction residual at Re k: %.3e, at 2 Re k: %.3e\n", model.residual(k_asym.real()),
                model.residual(2.0 * k_asym.real()));
}
