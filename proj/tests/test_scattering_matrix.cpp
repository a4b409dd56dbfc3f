#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "volcano/resonance_finder.hpp"
#include "volcano/scattering_matrix.hpp"

using namespace volcano;

namespace {

const cplx I(0.0, 1.0);

/// -i e^{2im} H2/H1 (even, order 1) or +i e^{2im} H2/H1 (odd, order 2) from
/// the series oracle; on the real axis H2 = conj(H1).
cplx s_oracle(Parity p, double m) {
    const int a = p == Parity::even ? 1 : 2;
    const cplx h1 = oracle::hankel1(a, m, 0.0);
    const cplx sign = p == Parity::even ? -I : I;
    return sign * std::exp(2.0 * I * m) * std::conj(h1) / h1;
}

/// Distance between two phases modulo pi.
double mod_pi_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

}  // namespace

TEST(SHat, AgreesWithSeriesOracle) {
    for (Parity p : {Parity::even, Parity::odd})
        for (double m : {0.05, 0.3, 1.0, 2.0, 3.0, 5.0, 6.5})
            EXPECT_LT(std::abs(s_hat(p, m) - s_oracle(p, m)), 1e-11) << parity_name(p) << " " << m;
}

TEST(SHat, UnimodularOnTheRealAxis) {
    EXPECT_NEAR(std::abs(s_hat(Parity::even, 3.0)), 1.0, 1e-12);
    std::vector<double> grid;
    for (int k = 0; k < 500; ++k) grid.push_back(1e-3 * std::pow(5e4, k / 499.0));
    EXPECT_LT(unitarity_scan(grid), 1e-10);
    EXPECT_NEAR(unitarity_scan({2.5}), std::max(std::abs(std::abs(s_hat(Parity::even, 2.5)) - 1.0),
                                                std::abs(std::abs(s_hat(Parity::odd, 2.5)) - 1.0)),
                0.0);
    EXPECT_THROW(unitarity_scan({}), InvalidArgument);
    EXPECT_THROW(unitarity_scan({1.0, -1.0}), InvalidArgument);
}

TEST(SHat, NotUnimodularOffTheAxis) {
    for (Parity p : {Parity::even, Parity::odd})
        EXPECT_GT(std::abs(std::abs(s_hat(p, RiemannPoint::principal(cplx(1.5, 0.3)))) - 1.0), 1e-2);
}

TEST(SHat, LowEnergyLimits) {
    EXPECT_EQ(s_hat_low_energy_limit(Parity::even), I);
    EXPECT_EQ(s_hat_low_energy_limit(Parity::odd), -I);
    EXPECT_LT(std::abs(s_hat(Parity::even, 1e-4) - I), 1e-3);
    EXPECT_LT(std::abs(s_hat(Parity::odd, 1e-4) + I), 1e-3);
    EXPECT_THROW(s_hat(Parity::even, 0.0), InvalidArgument);
}

TEST(SHat, AdjacentJumpBoundAsStated) {
    // literal bound: jumps < 1e-3 on a 1e-2 grid; |ds/dm| reaches 2 near
    // m = 0.2 (odd sector), so the exact function itself jumps by ~0.02
    double worst = 0.0;
    for (Parity p : {Parity::even, Parity::odd}) {
        cplx prev = s_hat(p, 0.1);
        for (double m = 0.11; m <= 20.0; m += 0.01) {
            const cplx cur = s_hat(p, m);
            worst = std::max(worst, std::abs(cur - prev));
            prev = cur;
        }
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(SHat, ContinuousAlongTheAxis) {
    // no jump beyond what the oracle derivative allows, and second
    // differences of the smooth curve stay at the h^2 scale
    const double h = 0.01;
    for (Parity p : {Parity::even, Parity::odd}) {
        // the series oracle is only used below 7
        for (double m = 0.11; m <= 6.5; m += h) {
            const cplx a = s_hat(p, m - h), b = s_hat(p, m), c = s_hat(p, m + h);
            const double slope = std::abs(s_oracle(p, m + 1e-6) - s_oracle(p, m - 1e-6)) / 2e-6;
            EXPECT_LT(std::abs(c - b), 1.05 * slope * h + 1e-6) << m;
            EXPECT_LT(std::abs(a - 2.0 * b + c), 1e-3) << m;
        }
        for (double m = 6.6; m <= 20.0; m += h) {
            const cplx a = s_hat(p, m - h), b = s_hat(p, m), c = s_hat(p, m + h);
            EXPECT_LT(std::abs(a - 2.0 * b + c), 1e-5) << m;
        }
    }
}

TEST(SHat, SurfaceFormMatchesRealForm) {
    for (Parity p : {Parity::even, Parity::odd})
        for (double m : {0.4, 2.0, 11.0})
            EXPECT_LT(std::abs(s_hat(p, RiemannPoint::principal(cplx(m, 0.0))) - s_hat(p, m)), 1e-11);
}

TEST(SHat, BlowsUpAtTheFirstZeroOfH2) {
    const Resonance r = refine_zero(2, 1, 0, cplx(0.429, -1.281));
    EXPECT_NEAR(r.position.real(), 0.429, 1e-3);
    EXPECT_NEAR(r.position.imag(), -1.281, 1e-3);
    for (int k = 0; k < 8; ++k) {
        const cplx probe = r.position + 5e-4 * std::polar(1.0, kPi * k / 4.0);
        EXPECT_GT(std::abs(s_hat(Parity::odd, RiemannPoint::principal(probe))), 1e3) << k;
    }
    EXPECT_THROW(s_hat(Parity::odd, r.point()), AtResonance);
}

TEST(SHat, SimplePole) {
    // |s| |m - m*| stays bounded above and below, and 1/s vanishes linearly
    const Resonance r = refine_zero(2, 1, 0, cplx(0.429, -1.281));
    const cplx dir = std::polar(1.0, 0.7);
    std::vector<double> residue;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const cplx s = s_hat(Parity::odd, RiemannPoint::principal(r.position + d * dir));
        residue.push_back(std::abs(s) * d);
    }
    for (double v : residue) EXPECT_NEAR(v / residue.back(), 1.0, 0.05);
    const cplx a = 1.0 / s_hat(Parity::odd, RiemannPoint::principal(r.position + 1e-4 * dir));
    const cplx b = 1.0 / s_hat(Parity::odd, RiemannPoint::principal(r.position - 1e-4 * dir));
    EXPECT_LT(std::abs(a + b), 1e-2 * std::abs(a));  // odd about the zero to first order
}

TEST(Amplitude, MatchesTheDisplayedFormula) {
    // sigma = 2, omega4 = 1: +-(e^{4i}/i) H^(2)/H^(1), convention factor +1
    const cplx h1 = oracle::hankel1(1, 2.0, 0.0), h2 = oracle::hankel1(2, 2.0, 0.0);
    const cplx even = std::exp(4.0 * I) / I * std::conj(h1) / h1;
    const cplx odd = -std::exp(4.0 * I) / I * std::conj(h2) / h2;
    EXPECT_LT(std::abs(amplitude(2.0, 1.0, Parity::even) - even), 1e-11);
    EXPECT_LT(std::abs(amplitude(2.0, 1.0, Parity::odd) - odd), 1e-11);
    EXPECT_EQ(amplitude(2.0, 1.0, Parity::even), s_hat(Parity::even, 2.0));
    EXPECT_EQ(amplitude(4.0, -0.5, Parity::odd), s_hat(Parity::odd, 2.0));
}

TEST(Amplitude, TransverseDirectionLimit) {
    for (Parity p : {Parity::even, Parity::odd}) {
        EXPECT_EQ(amplitude(1.0, 0.0, p), s_hat_low_energy_limit(p));
        EXPECT_LT(std::abs(amplitude(1.0, 1e-6, p) - amplitude(1.0, 0.0, p)), 1e-4);
    }
}

TEST(Amplitude, NegativeFrequencies) {
    for (Parity p : {Parity::even, Parity::odd})
        for (double s : {0.5, 3.0}) {
            const cplx neg = amplitude(-s, 0.8, p);
            EXPECT_NEAR(std::abs(neg), 1.0, 1e-12);
            EXPECT_LT(std::abs(neg - std::conj(amplitude(s, 0.8, p))), 1e-12);
        }
    EXPECT_THROW(amplitude(0.0, 0.5, Parity::even), InvalidArgument);
    EXPECT_THROW(amplitude(1.0, 1.5, Parity::even), InvalidArgument);
}

TEST(Amplitude, ContinuedAmplitude) {
    const RiemannPoint sigma = RiemannPoint::principal(cplx(2.0, -0.4));
    EXPECT_EQ(amplitude(sigma, 0.5, Parity::odd), s_hat(Parity::odd, sigma.scaled(0.5)));
    EXPECT_THROW(amplitude(sigma, 0.0, Parity::odd), InvalidArgument);
}

TEST(PhaseShift, NumericFitMatchesClosedForm) {
    for (Parity p : {Parity::even, Parity::odd}) {
        const int a = p == Parity::even ? 1 : 2;
        const double m = 2.0;
        const double want = m - 1.25 * kPi - std::arg(oracle::hankel1(a, m, 0.0));
        const PhaseFit f = phase_shift_numeric(p, m, 20.0, 40.0);
        EXPECT_LT(mod_pi_distance(f.delta, want), 1e-3) << parity_name(p);
        EXPECT_LT(mod_pi_distance(phase_shift_closed_form(p, m), want), 1e-12);
        EXPECT_NEAR(f.amplitude, std::sqrt(2.0 / kPi), 1e-3);
        EXPECT_LT(f.residual, 1e-3);
    }
}

TEST(PhaseShift, AcrossMasses) {
    for (Parity p : {Parity::even, Parity::odd})
        for (double m : {0.5, 1.0, 2.0, 3.5, 5.0}) {
            const double z1 = std::max(20.0, 10.0 / m);
            const PhaseFit f = phase_shift_numeric(p, m, z1, z1 + 8.0 * kPi / m);
            EXPECT_LT(mod_pi_distance(f.delta, phase_shift_closed_form(p, m)), 1e-3) << parity_name(p) << " " << m;
        }
}

TEST(PhaseShift, ConventionConstants) {
    // squaring the phase of the asymptotics gives s+ exactly and -s- for the odd sector
    for (double m : {0.5, 1.0, 2.0, 5.0}) {
        const double z1 = std::max(20.0, 10.0 / m), z2 = z1 + 8.0 * kPi / m;
        EXPECT_LT(std::abs(phase_convention_constant(Parity::even, m, z1, z2) - 1.0), 1e-3) << m;
        EXPECT_LT(std::abs(phase_convention_constant(Parity::odd, m, z1, z2) + 1.0), 1e-3) << m;
    }
}

TEST(PhaseShift, Preconditions) {
    EXPECT_THROW(phase_shift_numeric(Parity::odd, 2.0, 2.0, 40.0), PreconditionError);
    EXPECT_THROW(phase_shift_numeric(Parity::odd, 2.0, 20.0, 25.0), PreconditionError);
    EXPECT_THROW(phase_shift_numeric(Parity::odd, -2.0, 20.0, 40.0), InvalidArgument);
}
