#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "volcano/evolution.hpp"

using namespace volcano;

namespace {

const ModeBasis& basis30() {
    static const ModeBasis b = build_mode_basis(uniform_grid(30.0, 0.02), default_mass_rule());
    return b;
}

double gaussian(double z, double c) { return std::exp(-(z - c) * (z - c)); }

double bump(double z, double c, double w) {
    const double x = (z - c) / w;
    return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
}

double sum_squares(const SpectralCoefficients& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.values.size(); ++k) s += c.m_rule.weights[k] * c.values[k] * c.values[k];
    return s;
}

/// Plain trapezoid of v^2 over the grid.
double l2_squared(const std::vector<double>& z, const std::vector<double>& v) {
    const double h = z[1] - z[0];
    double s = 0.5 * (v.front() * v.front() + v.back() * v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i] * v[i];
    return s * h;
}

double max_asymmetry(const GridField& f, int sign) {
    const std::size_t n = f.z_grid.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(f.u[i] - sign * f.u[n - 1 - i]));
    return worst;
}

}  // namespace

TEST(Grid, SymmetricGridAndParitySplit) {
    const auto z = symmetric_grid(2.0, 0.5);
    ASSERT_EQ(z.size(), 9u);
    EXPECT_DOUBLE_EQ(z.front(), -2.0);
    EXPECT_EQ(z[4], 0.0);
    std::vector<double> v(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v[i] = std::exp(z[i]);
    const ParitySplit s = split_parity(z, v);
    for (std::size_t i = 0; i < s.z.size(); ++i) {
        EXPECT_NEAR(s.even[i], std::cosh(s.z[i]), 1e-14);
        EXPECT_NEAR(s.odd[i], std::sinh(s.z[i]), 1e-14);
    }
    const auto back = join_parity(s.even, s.odd);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(back[i], v[i], 1e-14);
}

TEST(Grid, Validation) {
    GridField f = sample_field(symmetric_grid(1.0, 0.1), [](double) { return 0.0; }, [](double) { return 0.0; });
    EXPECT_NO_THROW(f.validate());
    f.u.pop_back();
    EXPECT_THROW(f.validate(), InvalidArgument);
    GridField g = sample_field(symmetric_grid(1.0, 0.1), [](double) { return 0.0; }, [](double) { return 0.0; });
    g.u[3] = std::nan("");
    EXPECT_THROW(g.validate(), InvalidArgument);
}

TEST(Decompose, ZeroModeData) {
    const auto& b = basis30();
    const GridField data = sample_field(symmetric_grid(30.0, 0.02), [](double z) { return f0_eval(z); },
                                        [](double) { return 0.0; });
    const SpectralState s = decompose(data, 1.0, b);
    // the grid truncates the full-line norm at |z| = 30: 1 - 1/31^2
    EXPECT_NEAR(s.zero_a.real(), 0.5, 1e-3);
    EXPECT_NEAR(s.zero_b.real(), 0.5, 1e-3);
    EXPECT_NEAR(s.zero_a.imag(), 0.0, 1e-14);
    EXPECT_LT(sum_squares(s.kk_even.cos_part), 1e-3);
    EXPECT_EQ(sum_squares(s.kk_odd.cos_part), 0.0);
    EXPECT_FALSE(s.secular_zero_mode);
}

TEST(Decompose, OddDataAndZeroData) {
    const auto& b = basis30();
    const auto z = symmetric_grid(30.0, 0.02);
    const GridField odd = sample_field(z, [](double x) { return x * gaussian(x, 0.0); },
                                       [](double x) { return std::sin(x) * gaussian(x, 0.0); });
    const SpectralState s = decompose(odd, 0.5, b);
    EXPECT_EQ(s.zero_a, cplx(0.0));
    EXPECT_EQ(s.zero_b, cplx(0.0));
    for (double v : s.kk_even.cos_part.values) EXPECT_EQ(v, 0.0);
    for (double v : s.kk_even.sin_part.values) EXPECT_EQ(v, 0.0);
    EXPECT_GT(sum_squares(s.kk_odd.cos_part), 0.1);

    const GridField zero = sample_field(z, [](double) { return 0.0; }, [](double) { return 0.0; });
    const SpectralState s0 = decompose(zero, 0.0, b);
    EXPECT_EQ(s0.zero_c0, 0.0);
    EXPECT_EQ(s0.zero_c1, 0.0);
    EXPECT_EQ(coefficient_energy(s0, 3.0), 0.0);
}

TEST(Decompose, SecularZeroModeIsReported) {
    const auto z = symmetric_grid(30.0, 0.02);
    const GridField data = sample_field(z, [](double) { return 0.0; }, [](double x) { return gaussian(x, 0.0); });
    const SpectralState s = decompose(data, 0.0, basis30());
    EXPECT_TRUE(s.secular_zero_mode);
    const auto [c, c_t] = zero_mode_at(s, 4.0);
    EXPECT_NEAR(c, 4.0 * s.zero_c1, 1e-14);
    EXPECT_EQ(c_t, s.zero_c1);
    EXPECT_THROW(decompose(data, -1.0, basis30()), InvalidArgument);
}

TEST(Decompose, ZeroModeAmplitudesForNonzeroXi) {
    // A = (1/2) int f0 (u0 - i u1 / xi), B its conjugate partner
    const auto z = symmetric_grid(30.0, 0.02);
    const double xi = 0.7;
    const GridField data =
        sample_field(z, [](double x) { return gaussian(x, 1.0); }, [](double x) { return bump(x, -0.5, 2.0); });
    const SpectralState s = decompose(data, xi, basis30());
    const double h = 0.02;
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double w = (i == 0 || i + 1 == z.size()) ? 0.5 * h : h;
        c0 += w * f0_eval(z[i]) * data.u[i];
        c1 += w * f0_eval(z[i]) * data.u_t[i];
    }
    EXPECT_NEAR(s.zero_a.real(), 0.5 * c0, 1e-5);
    EXPECT_NEAR(s.zero_a.imag(), -0.5 * c1 / xi, 1e-5);
    EXPECT_NEAR(s.zero_b.imag(), 0.5 * c1 / xi, 1e-5);
}

TEST(SpectralPropagate, RoundTripAtTimeZero) {
    const auto& b = basis30();
    const auto z = symmetric_grid(30.0, 0.02);
    const GridField data = sample_field(z, [](double x) { return gaussian(x, 3.0); }, [](double) { return 0.0; });
    const GridField back = spectral_propagate(decompose(data, 0.0, b), 0.0, b);
    ASSERT_EQ(back.z_grid.size(), z.size());
    std::vector<double> d(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) d[i] = back.u[i] - data.u[i];
    EXPECT_LT(std::sqrt(l2_squared(z, d) / l2_squared(z, data.u)), 1e-2);
}

TEST(SpectralPropagate, PureZeroModeKeepsItsShape) {
    const auto& b = basis30();
    SpectralState s;
    s.xi = 1.3;
    s.zero_a = cplx(0.5, -0.2);
    s.zero_b = std::conj(s.zero_a);
    SpectralCoefficients empty;
    empty.m_rule = b.m_rule;
    empty.values.assign(b.nm(), 0.0);
    s.kk_even = {empty, empty};
    s.kk_odd = {empty, empty};
    const double t = 2.7;
    const GridField f = spectral_propagate(s, t, b, 500);
    const double amp = 2.0 * (s.zero_a * std::polar(1.0, s.xi * t)).real();
    for (std::size_t i = 0; i < f.z_grid.size(); ++i) EXPECT_NEAR(f.u[i], amp * f0_eval(f.z_grid[i]), 1e-14);
}

TEST(SpectralPropagate, CoefficientEnergyIsConserved) {
    const auto z = symmetric_grid(30.0, 0.02);
    const GridField data = sample_field(z, [](double x) { return gaussian(x, 2.0); },
                                        [](double x) { return -2.0 * (x - 2.0) * gaussian(x, 2.0); });
    const SpectralState s = decompose(data, 0.4, basis30());
    const double e0 = coefficient_energy(s, 0.0);
    double drift = 0.0;
    for (double t = 0.5; t <= 50.0; t += 0.5) drift = std::max(drift, std::abs(coefficient_energy(s, t) / e0 - 1.0));
    EXPECT_LT(drift, 1e-10);
}

TEST(SpectralPropagate, GridEnergyMatchesAndIsConserved) {
    const auto& b = basis30();
    const auto z = symmetric_grid(30.0, 0.02);
    const GridField data = sample_field(z, [](double x) { return gaussian(x, 3.0); }, [](double) { return 0.0; });
    const SpectralState s = decompose(data, 0.5, b);
    const double e0 = energy(spectral_propagate(s, 0.0, b), 0.5);
    const double e5 = energy(spectral_propagate(s, 5.0, b), 0.5);
    EXPECT_LT(std::abs(e5 / e0 - 1.0), 1e-5);
    EXPECT_LT(std::abs(e0 / energy(data, 0.5) - 1.0), 1e-3);
}

TEST(SpectralPropagate, ParityIsPreserved) {
    const auto& b = basis30();
    const auto z = symmetric_grid(30.0, 0.02);
    const GridField even = sample_field(z, [](double x) { return gaussian(x, 2.0) + gaussian(x, -2.0); },
                                        [](double) { return 0.0; });
    const GridField odd = sample_field(z, [](double x) { return gaussian(x, 2.0) - gaussian(x, -2.0); },
                                       [](double) { return 0.0; });
    EXPECT_LT(max_asymmetry(spectral_propagate(decompose(even, 0.0, b), 4.0, b), 1), 1e-10);
    EXPECT_LT(max_asymmetry(spectral_propagate(decompose(odd, 0.0, b), 4.0, b), -1), 1e-10);
}

TEST(Fdtd, ZeroStaysZero) {
    const GridField zero =
        sample_field(symmetric_grid(5.0, 0.05), [](double) { return 0.0; }, [](double) { return 0.0; });
    const GridField out = fdtd_propagate(zero, 1.0, 2.0, 0.5);
    for (double v : out.u) EXPECT_EQ(v, 0.0);
    EXPECT_DOUBLE_EQ(out.time, 2.0);
    EXPECT_LE(out.cfl, 0.5 + 1e-12);
}

TEST(Fdtd, Preconditions) {
    const GridField data =
        sample_field(symmetric_grid(10.0, 0.05), [](double x) { return bump(x, 0.0, 2.0); }, [](double) { return 0.0; });
    EXPECT_THROW(fdtd_propagate(data, 0.0, 1.0, 0.95), InvalidArgument);
    EXPECT_THROW(fdtd_propagate(data, 0.0, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(fdtd_propagate(data, 0.0, -1.0, 0.5), InvalidArgument);
    EXPECT_THROW(fdtd_propagate(data, 0.0, 9.0, 0.5), PreconditionError);
    EXPECT_NO_THROW(fdtd_propagate(data, 0.0, 7.0, 0.9));
}

TEST(Fdtd, ParityIsPreservedExactly) {
    const auto z = symmetric_grid(20.0, 0.02);
    const GridField even =
        sample_field(z, [](double x) { return bump(x, 1.0, 2.0) + bump(x, -1.0, 2.0); }, [](double) { return 0.0; });
    const GridField odd =
        sample_field(z, [](double x) { return bump(x, 1.0, 2.0) - bump(x, -1.0, 2.0); }, [](double) { return 0.0; });
    EXPECT_LT(max_asymmetry(fdtd_propagate(even, 0.3, 5.0, 0.5), 1), 1e-12);
    EXPECT_LT(max_asymmetry(fdtd_propagate(odd, 0.3, 5.0, 0.5), -1), 1e-12);
}

TEST(Fdtd, ConvergesToTheSpectralSolution) {
    const auto& b = basis30();
    auto u0 = [](double x) { return gaussian(x, 3.0); };
    auto zero = [](double) { return 0.0; };
    const double t = 5.0;
    const GridField spectral = spectral_propagate(decompose(sample_field(symmetric_grid(30.0, 0.02), u0, zero), 0.0, b), t, b);
    std::vector<double> diffs;
    for (double dz : {0.08, 0.04, 0.02}) {
        const GridField fd = fdtd_propagate(sample_field(symmetric_grid(24.0, dz), u0, zero), 0.0, t, 0.5);
        diffs.push_back(relative_l2_difference(fd, spectral, 10.0));
    }
    EXPECT_LT(diffs.back(), 1e-2);
    EXPECT_GT(diffs[0] / diffs[1], 3.0) << diffs[0] << " " << diffs[1];
    EXPECT_GT(diffs[1] / diffs[2], 3.0) << diffs[1] << " " << diffs[2];
}

TEST(Fdtd, EnergyDrift) {
    const auto z = symmetric_grid(63.0, 0.005);
    const GridField data = sample_field(z, [](double x) { return gaussian(x, 3.0); }, [](double) { return 0.0; });
    const double e0 = energy(data, 0.2);
    GridField cur = data;
    double drift = 0.0;
    for (int k = 1; k <= 10; ++k) {
        cur = fdtd_propagate(cur, 0.2, 5.0, 0.5);
        drift = std::max(drift, std::abs(energy(cur, 0.2) / e0 - 1.0));
    }
    EXPECT_LT(drift, 1e-3);
}

TEST(Energy, ZeroModeIsEnergyNull) {
    const GridField f = sample_field(symmetric_grid(30.0, 0.01), [](double z) { return f0_eval(z); },
                                     [](double) { return 0.0; });
    EXPECT_LT(energy(f, 0.0), 1e-12);
}

TEST(Energy, PureVelocity) {
    const auto z = symmetric_grid(20.0, 0.01);
    const GridField f = sample_field(z, [](double) { return 0.0; }, [](double x) { return bump(x, 0.5, 3.0); });
    const double exact = oracle::simpson([](double x) { return std::pow(bump(x, 0.5, 3.0), 2); }, -2.5, 3.5, 20000);
    EXPECT_NEAR(energy(f, 0.7), exact, 1e-8);
}

TEST(Energy, TwistedFormEqualsBraneTermForm) {
    const auto z = symmetric_grid(20.0, 0.005);
    const GridField f = sample_field(z, [](double x) { return bump(x, 0.8, 3.0); },
                                     [](double x) { return 0.3 * bump(x, -1.0, 2.0); });
    const double a = energy(f, 0.4), b = energy_with_brane_term(f, 0.4);
    EXPECT_LT(std::abs(a - b) / a, 1e-6);
}

TEST(Energy, RelativeDifferenceNeedsNestedGrids) {
    auto u = [](double x) { return bump(x, 0.0, 2.0); };
    auto zero = [](double) { return 0.0; };
    const GridField a = sample_field(symmetric_grid(6.0, 0.03), u, zero);
    const GridField b = sample_field(symmetric_grid(6.0, 0.02), u, zero);
    EXPECT_THROW(relative_l2_difference(a, b, 3.0), PreconditionError);
    const GridField c = sample_field(symmetric_grid(6.0, 0.01), u, zero);
    EXPECT_LT(relative_l2_difference(a, c, 3.0), 1e-15);
    const GridField short_fine = sample_field(symmetric_grid(3.0, 0.01), u, zero);
    EXPECT_THROW(relative_l2_difference(a, short_fine, 5.0), PreconditionError);
}
