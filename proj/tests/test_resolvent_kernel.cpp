#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "volcano/resolvent_kernel.hpp"
#include "volcano/resonance_finder.hpp"

using namespace volcano;

namespace {

double bump(double z, double c, double w) {
    const double x = (z - c) / w;
    return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
}

HalfLineFunction bump_data(double dz, double c = 3.0, double w = 1.5) {
    return HalfLineFunction::sample(uniform_grid(c + w, dz), [=](double z) { return bump(z, c, w); }, c + w);
}

/// -u'' + V u - m^2 u - f by the three-point stencil on interior nodes
/// away from the brane and the far end; relative L2.
double interior_green_residual(cplx m, const ComplexHalfLine& u, const HalfLineFunction& f) {
    const double h = u.z_grid[1] - u.z_grid[0];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i + 1 < u.z_grid.size(); ++i) {
        const double z = u.z_grid[i];
        const double fi = i < f.values.size() ? f.values[i] : 0.0;
        const cplx d2 = (u.values[i - 1] - 2.0 * u.values[i] + u.values[i + 1]) / (h * h);
        const cplx r = -d2 + (15.0 / 4.0) / ((1.0 + z) * (1.0 + z)) * u.values[i] - m * m * u.values[i] - fi;
        num += std::norm(r);
        den += fi * fi;
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST(KernelCore, VanishesAtTheOriginAndIsSymmetric) {
    for (cplx m : {cplx(1.0, 0.5), cplx(-2.0, 0.3), cplx(0.2, 3.0)}) {
        EXPECT_LT(std::abs(kernel_core(m, 0.0, 0.0)), 1e-15);
        EXPECT_EQ(kernel_core(m, 1.0, 2.0), kernel_core(m, 2.0, 1.0));
        EXPECT_EQ(kernel_core(m, 0.3, 7.5), kernel_core(m, 7.5, 0.3));
    }
    EXPECT_THROW(kernel_core(cplx(0.0), 1.0, 2.0), InvalidArgument);
}

TEST(KernelCore, ExponentialEnvelope) {
    const cplx m(1.0, 0.5);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double zp = 3.0; zp <= 20.0; zp += 0.25, ++n) {
        const double y = std::log(std::abs(kernel_core(m, 1.0, zp)));
        sx += zp;
        sy += y;
        sxx += zp * zp;
        sxy += zp * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, -0.5, 0.05);
}

TEST(KernelCore, NoOverflowForLargeImaginaryPart) {
    const cplx v = kernel_core(cplx(0.5, 40.0), 10.0, 30.0);
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
    EXPECT_LT(std::abs(v), 1e-100);
}

TEST(KernelParity, OddKernelIsDirichlet) {
    for (double zp : {0.5, 2.0, 9.0})
        EXPECT_EQ(kernel_parity({cplx(1.0, 1.0), Parity::odd, 0.0, zp}), cplx(0.0));
}

TEST(KernelParity, EvenKernelIsRobin) {
    const cplx m(1.0, 1.0);
    const double h = 1e-3;
    cplx p[5];
    for (int i = 0; i < 5; ++i) p[i] = kernel_parity({m, Parity::even, i * h, 2.0});
    const cplx d = (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12.0 * h);
    EXPECT_LT(std::abs(d + 1.5 * p[0]), 1e-5);
    EXPECT_GT(std::abs(p[0]), 1e-3);
}

TEST(KernelParity, UnitJumpAcrossTheDiagonal) {
    // d/dz K(z, z') jumps by -1 at z = z'
    const cplx m(0.8, 0.6);
    const double zp = 2.0, h = 1e-4;
    for (Parity p : {Parity::even, Parity::odd}) {
        auto k = [&](double z) { return kernel_parity({m, p, z, zp}); };
        const cplx right = (-3.0 * k(zp) + 4.0 * k(zp + h) - k(zp + 2 * h)) / (2 * h);
        const cplx left = (3.0 * k(zp) - 4.0 * k(zp - h) + k(zp - 2 * h)) / (2 * h);
        EXPECT_LT(std::abs(right - left + 1.0), 1e-6);
    }
}

TEST(KernelParity, QueryValidationAndResonance) {
    EXPECT_THROW(kernel_parity({cplx(1.0, 0.0), Parity::even, 1.0, 2.0}), InvalidArgument);
    EXPECT_THROW(kernel_parity({cplx(1.0, 1.0), Parity::even, -1.0, 2.0}), InvalidArgument);
    const Resonance r = refine_zero(1, 1, 0, cplx(-0.419, -0.577));
    EXPECT_THROW(kernel_parity(Parity::even, r.point(), 1.0, 2.0), AtResonance);
    EXPECT_NO_THROW(kernel_parity(Parity::odd, r.point(), 1.0, 2.0));
}

TEST(KernelParity, SurfaceFormAgreesWithScaledForm) {
    for (cplx m : {cplx(1.0, 1.0), cplx(-0.7, 0.4), cplx(2.5, 0.1)})
        for (Parity p : {Parity::even, Parity::odd}) {
            const cplx a = kernel_parity({m, p, 0.7, 3.1});
            const cplx b = kernel_parity(p, RiemannPoint::principal(m), 0.7, 3.1);
            EXPECT_LT(oracle::rel(b, a), 1e-11);
        }
}

TEST(ApplyKernel, SolvesTheResolventEquation) {
    const cplx m(1.0, 0.5);
    const HalfLineFunction f = bump_data(0.005);
    const auto out = uniform_grid(40.0, 0.005);
    for (Parity p : {Parity::even, Parity::odd}) {
        const ComplexHalfLine u = apply_kernel(p, m, f, out);
        EXPECT_LT(interior_green_residual(m, u, f), 1e-3);
        EXPECT_LT(green_identity_residual(p, m, u, f), 1e-3);
    }
}

TEST(ApplyKernel, Preconditions) {
    const HalfLineFunction f = bump_data(0.01);
    EXPECT_THROW(apply_kernel(Parity::odd, cplx(1.0, 0.0), f, uniform_grid(10.0, 0.01)), InvalidArgument);
    EXPECT_THROW(apply_kernel(Parity::odd, cplx(1.0, 1.0), f, uniform_grid(2.0, 0.01)), PreconditionError);
    EXPECT_THROW(apply_kernel(Parity::odd, cplx(1.0, 1.0), f, uniform_grid(10.0, 0.02)), PreconditionError);
}

TEST(DirectSolve, AgreesWithTheKernel) {
    const cplx m(1.0, 0.5);
    const HalfLineFunction f = bump_data(0.005);
    for (Parity p : {Parity::even, Parity::odd}) {
        const ComplexHalfLine direct = resolvent_direct_solve(p, m, f, 40.0);
        const ComplexHalfLine kernel = apply_kernel(p, m, f, direct.z_grid);
        EXPECT_LT(relative_l2(direct, kernel.values), 1e-3) << parity_name(p);
    }
}

TEST(DirectSolve, AgreementImprovesAtSecondOrder) {
    const cplx m(0.7, 0.8);
    for (Parity p : {Parity::even, Parity::odd}) {
        std::vector<double> err;
        for (double dz : {0.02, 0.01}) {
            const HalfLineFunction f = bump_data(dz, 2.0, 1.0);
            const ComplexHalfLine direct = resolvent_direct_solve(p, m, f, 20.0);
            err.push_back(relative_l2(direct, apply_kernel(p, m, f, direct.z_grid).values));
        }
        EXPECT_GE(std::log2(err[0] / err[1]), 1.8) << parity_name(p) << " " << err[0] << " " << err[1];
    }
}

TEST(DirectSolve, ZeroLinearityAndPreconditions) {
    const cplx m(1.0, 0.5);
    const HalfLineFunction f = bump_data(0.01);
    HalfLineFunction zero = f, twice = f;
    for (auto& v : zero.values) v = 0.0;
    for (auto& v : twice.values) v *= 2.0;
    for (const cplx& v : resolvent_direct_solve(Parity::even, m, zero, 30.0).values) EXPECT_EQ(v, cplx(0.0));
    const auto a = resolvent_direct_solve(Parity::even, m, f, 30.0), b = resolvent_direct_solve(Parity::even, m, twice, 30.0);
    for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_LT(std::abs(b.values[i] - 2.0 * a.values[i]), 1e-13);
    EXPECT_THROW(resolvent_direct_solve(Parity::odd, cplx(1.0, 0.05), f, 300.0), PreconditionError);
    EXPECT_THROW(resolvent_direct_solve(Parity::odd, m, f, 15.0), PreconditionError);
}

TEST(TruncatedKernel, EmptyIntervalAndBranch) {
    EXPECT_EQ(truncated_kernel_4d(cplx(2.0, 1.0), 0.0, 1.0, 1.0, 2.0, true), cplx(0.0));
    EXPECT_THROW(truncated_kernel_4d(cplx(2.0, -1.0), 1.0, 1.0, 1.0, 2.0, true), InvalidArgument);
    EXPECT_EQ(upper_sqrt(cplx(-4.0, 0.0)), cplx(0.0, 2.0));
    EXPECT_EQ(upper_sqrt(cplx(4.0, 0.0)), cplx(2.0, 0.0));
    EXPECT_GE(std::arg(upper_sqrt(cplx(-1.0, -1e-3))), 0.0);
}

TEST(TruncatedKernel, AgreesWithDirectSimpson) {
    const cplx lambda(2.0, 1.0);
    const double R = 1.5, d = 0.8, z = 0.5, zp = 2.0;
    for (bool same : {true, false}) {
        auto g = [&](double r, bool imag) {
            const cplx mu = upper_sqrt(lambda * lambda - r * r);
            const cplx k = kernel_parity_unrestricted(Parity::even, mu, z, zp) +
                           (same ? 1.0 : -1.0) * kernel_parity_unrestricted(Parity::odd, mu, z, zp);
            const cplx v = std::sin(r * d) / d / (4.0 * kPi * kPi) * k * r;
            return imag ? v.imag() : v.real();
        };
        const cplx want(oracle::simpson([&](double r) { return g(r, false); }, 0.0, R, 2000),
                        oracle::simpson([&](double r) { return g(r, true); }, 0.0, R, 2000));
        EXPECT_LT(oracle::rel(truncated_kernel_4d(lambda, R, d, z, zp, same), want), 1e-7);
    }
}

TEST(TruncatedKernel, CoincidentPointsLimit) {
    const cplx lambda(1.0, 0.8);
    const cplx at0 = truncated_kernel_4d(lambda, 2.0, 0.0, 1.0, 1.5, true);
    const cplx near = truncated_kernel_4d(lambda, 2.0, 1e-6, 1.0, 1.5, true);
    EXPECT_TRUE(std::isfinite(at0.real()) && std::isfinite(at0.imag()));
    EXPECT_LT(oracle::rel(near, at0), 1e-9);
}

TEST(TruncatedKernel, DecaysAwayFromTheBrane) {
    const cplx lambda(1.0, 0.8);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double zp = 2.0; zp <= 12.0; zp += 1.0, ++n) {
        const double y = std::log(std::abs(truncated_kernel_4d(lambda, 1.0, 0.5, 0.5, zp, true)));
        sx += zp;
        sy += y;
        sxx += zp * zp;
        sxy += zp * y;
    }
    EXPECT_LT((n * sxy - sx * sy) / (n * sxx - sx * sx), -0.1);
}

TEST(ContinuationProbe, PathBelowThePositiveAxisIsSmooth) {
    std::vector<RiemannPoint> path;
    for (int k = 0; k <= 200; ++k) {
        const double th = kPi + kPi * k / 200.0;  // lower semicircle around 1.5
        path.push_back(RiemannPoint::principal(cplx(1.5, 0.0) + 0.8 * std::polar(1.0, th)));
    }
    const auto v = continuation_probe(Parity::even, path);
    double jump = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_TRUE(std::isfinite(v[i].real()) && std::isfinite(v[i].imag()));
        peak = std::max(peak, std::abs(v[i]));
        if (i) jump = std::max(jump, std::abs(v[i] - v[i - 1]));
    }
    EXPECT_LT(jump, 0.1 * peak);
}

TEST(ContinuationProbe, PoleAtTheFirstZero) {
    const Resonance r = refine_zero(1, 1, 0, cplx(-0.419, -0.577));
    const cplx dir = std::polar(1.0, 0.3);
    std::vector<double> scaled;
    for (double d : {1e-1, 3e-2, 1e-2, 3e-3}) {
        const RiemannPoint p = RiemannPoint::principal(r.position + d * dir);
        scaled.push_back(std::abs(continuation_probe(Parity::even, {p})[0]) * d);
    }
    for (double s : scaled) EXPECT_NEAR(s / scaled.back(), 1.0, 0.2);
    EXPECT_THROW(continuation_probe(Parity::even, {RiemannPoint::principal(r.position + 5e-4)}), AtResonance);
}

TEST(ContinuationProbe, ClosedLoops) {
    // a loop in a zero-free patch comes back to its value; a loop around
    // the origin lands on the next sheet, where the kernel differs
    std::vector<RiemannPoint> loop;
    for (int k = 0; k <= 64; ++k) loop.push_back(RiemannPoint::principal(cplx(2.0, 0.5) + 0.3 * std::polar(1.0, 2 * kPi * k / 64)));
    const auto v = continuation_probe(Parity::odd, loop);
    EXPECT_LT(std::abs(v.back() - v.front()), 1e-8 * std::abs(v.front()));

    std::vector<RiemannPoint> around;
    for (int k = 0; k <= 64; ++k) around.emplace_back(2.0, 2 * kPi * k / 64);
    const auto w = continuation_probe(Parity::odd, around);
    EXPECT_EQ(around.back().sheet_index(), 1);
    EXPECT_GT(std::abs(w.back() - w.front()), 1e-3 * std::abs(w.front()));
}
