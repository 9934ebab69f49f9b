// Disk and ball critical wavenumbers for mu = delta = 1e-2, 1e-3, 1e-4.

#include <cstdio>

#include "minnaert/radial.hpp"

int main() {
    using namespace minnaert;
    std::printf("%-9s %-24s %-24s %-24s %-24s\n", "mu=delta", "k_b2", "k_d2", "k_b3", "k_d3+");
    for (const Table1Row& r : table1()) {
        std::printf("%-9g", r.medium.mu);
        for (const ResonanceResult* k : {&r.k_b2, &r.k_d2, &r.k_b3, &r.k_d3})
            std::printf(" %.6f%+.6fi%6s", k->k_root.real(), k->k_root.imag(), "");
        std::printf("\n");
    }
}
