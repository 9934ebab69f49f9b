// Residual scan of a prolate spheroid bubble and the enhanced-resonance condition.

#include <cstdio>
#include <vector>

#include "minnaert/general.hpp"
#include "minnaert/radial.hpp"

int main() {
    using namespace minnaert;
    const Medium m = Medium::table(1e-3);
    const QuadratureSurface s = build_surface(ShapeDescriptor::ellipsoid(1.0, 1.0, 1.3, 20, 40));
    const auto geo = make_geometry(s);
    const ResonanceModel model(geo, m, 2);

    std::vector<cplx> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(0.05 + 0.005 * i);
    const ScanResult scan = residual_scan(model, grid);
    std::printf("%8s %12s\n", "k", "residual");
    for (const ScanRow& r : scan.rows) std::printf("%8.4f %12.4e\n", r.k.real(), r.residual);
    std::printf("minimizer k = %.6f (residual %.4e); unit ball Re k_b3 = %.6f\n", scan.minimizer.k.real(),
                scan.minimizer.residual, table1_row(m).k_b3.k_root.real());

    const EnhancedReport e = enhanced_condition(*geo, m);
    std::printf("tangential fraction of R_{2,0}[nu]: %.4f (%s)\n", e.tangential_fraction,
                e.solvable ? "enhanced condition solvable" : "weak resonance only");
    if (e.solvable) std::printf("enhanced k = %.6f%+.6fi\n", e.k_roots.first.real(), e.k_roots.first.imag());
}
