// Prints the first resonances of each parity sector, the scattering
// amplitude along the real axis and its growth near the first pole.

#include <cstdio>

#include "volcano/volcano.hpp"

using namespace volcano;

int main() {
    std::printf("principal-sheet zeros of H^(1)_nu (resonance positions)\n");
    for (int nu : {1, 2}) {
        for (const Resonance& r : seed_sweep(nu, 1, 0, 3))
            std::printf("  nu=%d  %+.6f %+.6fi  |H|=%.1e\n", nu, r.position.real(), r.position.imag(), r.residual);
    }

    std::printf("\nscattering amplitude on the real axis\n");
    std::printf("      m    phase(even)   phase(odd)\n");
    for (double m : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0})
        std::printf("  %5.1f  %12.6f  %12.6f\n", m, phase_shift_closed_form(Parity::even, m),
                    phase_shift_closed_form(Parity::odd, m));

    const Resonance pole = refine_zero(2, 1, 0, cplx(0.429, -1.281));
    std::printf("\nodd-sector |s| approaching the pole at %+.4f %+.4fi\n", pole.position.real(), pole.position.imag());
    for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const cplx s = s_hat(Parity::odd, RiemannPoint::principal(pole.position + cplx(d, 0.0)));
        std::printf("  distance %.0e  |s| = %.4e\n", d, std::abs(s));
    }
    return 0;
}
