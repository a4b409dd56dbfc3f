#pragma once
/**
 * @file resolvent_kernel.hpp
 * @brief Green kernels of (h -+ m^2)^{-1} on the half line, the truncated
 *        4-D resolvent kernel, and a finite-difference oracle.
 *
 * With xi = 1 + z and phi_j(xi) = sqrt(xi) H^(j)_2(m xi) (solutions of
 * -u'' + (15/4) u / xi^2 = m^2 u), the kernels are
 *
 *   K(z, z') = (pi / 4i) psi_0(xi_min) phi_1(xi_max) / D(m),
 *
 * psi_0 = H^(2)_a(m) phi_1 - H^(1)_a(m) phi_2 and D = H^(1)_a(m), with
 * anchor order a = 2 for the odd (Dirichlet) sector and a = 1 for the even
 * (Robin) sector, since phi' + 1.5 phi at xi = 1 equals m H_1(m).
 */

#include <algorithm>
#include <cmath>
#include <vector>

#include "volcano/distorted_transform.hpp"
#include "volcano/errors.hpp"
#include "volcano/parallel.hpp"
#include "volcano/quadrature.hpp"
#include "volcano/special_functions.hpp"
#include "volcano/volcano_spectrum.hpp"

namespace volcano {

/// Denominators smaller than this mark a resonance.
inline constexpr double kResonanceThreshold = 1e-8;

struct ResolventQuery {
    cplx m;
    Parity parity = Parity::even;
    double z = 0.0;
    double z_prime = 0.0;

    void validate() const {
        if (!(m.imag() > 0.0)) throw InvalidArgument("ResolventQuery: Im m must be positive");
        if (!(z >= 0.0) || !(z_prime >= 0.0)) throw InvalidArgument("ResolventQuery: z, z' must be non-negative");
    }
};

namespace detail {

/// (pi/4i) sqrt(xi xi') [H^(2)_a(m) H^(1)_2(m xi<) - H^(1)_a(m) H^(2)_2(m xi<)] H^(1)_2(m xi>)
/// with every Hankel function taken scaled, so the exponentials combine
/// into two factors of modulus <= 1 when Im m >= 0.
inline cplx kernel_numerator(int anchor, cplx m, double z, double zp) {
    if (m == cplx(0.0)) throw InvalidArgument("kernel: m must be non-zero");
    const double lo = 1.0 + std::min(z, zp), hi = 1.0 + std::max(z, zp);
    const cplx i(0.0, 1.0);
    const cplx a1 = hankel_scaled(1, anchor, m), a2 = hankel_scaled(2, anchor, m);
    const cplx s1lo = hankel_scaled(1, 2, m * lo), s2lo = hankel_scaled(2, 2, m * lo);
    const cplx s1hi = hankel_scaled(1, 2, m * hi);
    const cplx first = a2 * s1lo * std::exp(i * m * (lo - 1.0 + hi));
    const cplx second = a1 * s2lo * std::exp(i * m * (1.0 - lo + hi));
    return kPi / (4.0 * i) * std::sqrt(lo * hi) * (first - second) * s1hi;
}

/// Same numerator on an arbitrary sheet (no scaling; moderate arguments).
inline cplx kernel_numerator(int anchor, const RiemannPoint& m, double z, double zp) {
    const double lo = 1.0 + std::min(z, zp), hi = 1.0 + std::max(z, zp);
    const cplx i(0.0, 1.0);
    const RiemannPoint mlo = m.scaled(lo), mhi = m.scaled(hi);
    const cplx bracket = hankel(2, anchor, m) * hankel(1, 2, mlo) - hankel(1, anchor, m) * hankel(2, 2, mlo);
    return kPi / (4.0 * i) * std::sqrt(lo * hi) * bracket * hankel(1, 2, mhi);
}

inline int anchor_for(Parity p) { return p == Parity::even ? 1 : 2; }

}  // namespace detail

/// Shared kernel built on the order-2 anchor (the odd-sector numerator).
inline cplx kernel_core(cplx m, double z, double z_prime) { return detail::kernel_numerator(2, m, z, z_prime); }

/// K_+ or K_- for Im m > 0.
inline cplx kernel_parity(const ResolventQuery& q) {
    q.validate();
    const int a = detail::anchor_for(q.parity);
    const cplx d = hankel(1, a, q.m);
    if (std::abs(d) < kResonanceThreshold) throw AtResonance("kernel_parity: m is at a zero of the denominator");
    return detail::kernel_numerator(a, q.m, q.z, q.z_prime) / d;
}

/// Parity kernel without the half-plane restriction (used by the 4-D
/// integrand, where mu may sit on the real axis).
inline cplx kernel_parity_unrestricted(Parity p, cplx m, double z, double zp) {
    const int a = detail::anchor_for(p);
    const cplx d = hankel(1, a, m);
    if (std::abs(d) < kResonanceThreshold) throw AtResonance("kernel_parity: m is at a zero of the denominator");
    return detail::kernel_numerator(a, m, z, zp) / d;
}

/// Parity kernel at a point of the logarithmic surface.
inline cplx kernel_parity(Parity p, const RiemannPoint& m, double z, double zp) {
    const int a = detail::anchor_for(p);
    const cplx d = hankel(1, a, m);
    if (std::abs(d) < kResonanceThreshold) throw AtResonance("kernel_parity: m is at a zero of the denominator");
    return detail::kernel_numerator(a, m, z, zp) / d;
}

/// Complex samples on a half-line grid.
struct ComplexHalfLine {
    std::vector<double> z_grid;
    std::vector<cplx> values;

    HalfLineFunction real_part() const { return part(false); }
    HalfLineFunction imag_part() const { return part(true); }

private:
    HalfLineFunction part(bool imag) const {
        HalfLineFunction f;
        f.z_grid = z_grid;
        f.values.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) f.values[i] = imag ? values[i].imag() : values[i].real();
        f.support_bound = z_grid.back();
        return f;
    }
};

/// u(z) = int K(z, z') f(z') dz' on `out_grid`, trapezoid in z'. The
/// kernel separates into psi_0(z<) phi_1(z>), so two running sums suffice;
/// f's grid must be a prefix of out_grid.
inline ComplexHalfLine apply_kernel(Parity p, cplx m, const HalfLineFunction& f, const std::vector<double>& out_grid) {
    f.validate();
    if (!(m.imag() > 0.0)) throw InvalidArgument("apply_kernel: Im m must be positive");
    if (out_grid.size() < f.z_grid.size()) throw PreconditionError("apply_kernel: output grid shorter than data grid");
    for (std::size_t j = 0; j < f.z_grid.size(); ++j)
        if (std::abs(out_grid[j] - f.z_grid[j]) > 1e-12) throw PreconditionError("apply_kernel: grids must share a prefix");
    const int a = detail::anchor_for(p);
    const cplx d = hankel(1, a, m);
    if (std::abs(d) < kResonanceThreshold) throw AtResonance("apply_kernel: m is at a zero of the denominator");
    const cplx anchor1 = d, anchor2 = hankel(2, a, m);
    const std::size_t n = out_grid.size();
    std::vector<cplx> regular(n), outgoing(n);
    parallel_for(n, [&](std::size_t i) {
        const double xi = 1.0 + out_grid[i];
        const cplx w = m * xi;
        regular[i] = std::sqrt(xi) * (anchor2 * hankel(1, 2, w) - anchor1 * hankel(2, 2, w));
        outgoing[i] = std::sqrt(xi) * hankel(1, 2, w);
    });
    const auto wts = grid_weights(f.z_grid);
    const std::size_t nf = f.z_grid.size();
    // below[i] = sum_{j <= i} w f psi0,   above[i] = sum_{j > i} w f phi1
    std::vector<cplx> below(n, 0.0), above(n, 0.0);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < nf) acc += wts[i] * f.values[i] * regular[i];
        below[i] = acc;
    }
    acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        above[i] = acc;
        if (i < nf) acc += wts[i] * f.values[i] * outgoing[i];
    }
    const cplx pre = kPi / (4.0 * cplx(0.0, 1.0)) / d;
    ComplexHalfLine u;
    u.z_grid = out_grid;
    u.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) u.values[i] = pre * (outgoing[i] * below[i] + regular[i] * above[i]);
    return u;
}

/// Relative L2 distance of two complex samples on a common grid.
inline double relative_l2(const ComplexHalfLine& a, const std::vector<cplx>& b) {
    if (a.values.size() != b.size()) throw InvalidArgument("relative_l2: size mismatch");
    const auto w = grid_weights(a.z_grid);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        num += w[i] * std::norm(a.values[i] - b[i]);
        den += w[i] * std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

/**
 * @brief Second-order finite-difference solve of (h - m^2) u = f on
 *        [0, L] with u(L) = 0, Robin or Dirichlet at 0. The grid is that of
 *        f extended with the same step up to L.
 */
inline ComplexHalfLine resolvent_direct_solve(Parity p, cplx m, const HalfLineFunction& f, double L) {
    f.validate();
    if (!(m.imag() >= 0.1)) throw PreconditionError("resolvent_direct_solve: Im m must be at least 0.1");
    if (!(L >= 10.0 / m.imag())) throw PreconditionError("resolvent_direct_solve: L must be at least 10 / Im m");
    const double h = f.z_grid[1] - f.z_grid[0];
    const auto n = static_cast<std::size_t>(std::llround(L / h));  // u_n = 0
    if (n < f.z_grid.size()) throw PreconditionError("resolvent_direct_solve: L shorter than the data grid");
    const cplx m2 = m * m;
    auto rhs = [&](std::size_t i) { return i < f.values.size() ? cplx(f.values[i]) : cplx(0.0); };

    // unknowns u_first .. u_{n-1}
    const std::size_t first = (p == Parity::odd) ? 1 : 0;
    const std::size_t k = n - first;
    std::vector<cplx> lower(k), diag(k), upper(k), b(k);
    const double ih2 = 1.0 / (h * h);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = r + first;
        const double z = i * h;
        const double v = (i == 0) ? 3.75 : potential(z);
        diag[r] = 2.0 * ih2 + v - m2;
        lower[r] = -ih2;
        upper[r] = -ih2;
        b[r] = rhs(i);
    }
    if (p == Parity::even) {
        // ghost u_{-1} = u_1 + 3 h u_0
        diag[0] = (2.0 - 3.0 * h) * ih2 + 3.75 - m2;
        upper[0] = -2.0 * ih2;
    }
    // Thomas elimination
    for (std::size_t r = 1; r < k; ++r) {
        if (std::abs(diag[r - 1]) < 1e-300) throw NonConvergence("resolvent_direct_solve: singular system");
        const cplx w = lower[r] / diag[r - 1];
        diag[r] -= w * upper[r - 1];
        b[r] -= w * b[r - 1];
    }
    std::vector<cplx> x(k);
    x[k - 1] = b[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) x[r] = (b[r] - upper[r] * x[r + 1]) / diag[r];
    ComplexHalfLine u;
    u.z_grid.resize(n + 1);
    u.values.assign(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) u.z_grid[i] = i * h;
    for (std::size_t r = 0; r < k; ++r) u.values[r + first] = x[r];
    for (const cplx& v : u.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonConvergence("resolvent_direct_solve: ill-conditioned system");
    return u;
}

/// Residual ||(h - m^2) u - f|| / ||f|| with h applied by the fourth-order
/// stencil of apply_h_discrete (real and imaginary parts separately).
inline double green_identity_residual(Parity p, cplx m, const ComplexHalfLine& u, const HalfLineFunction& f) {
    const OperatorSample op = OperatorSample::make(u.z_grid, boundary_for(p));
    const HalfLineFunction hr = apply_h_discrete(op, u.real_part());
    const HalfLineFunction hi = apply_h_discrete(op, u.imag_part());
    const auto w = grid_weights(u.z_grid);
    const cplx m2 = m * m;
    double num = 0.0, den = 0.0;
    // the last few nodes see the zero extension beyond the grid
    const std::size_t stop = u.z_grid.size() > 4 ? u.z_grid.size() - 4 : 0;
    for (std::size_t i = 0; i < stop; ++i) {
        const double fi = i < f.values.size() ? f.values[i] : 0.0;
        const cplx r = cplx(hr.values[i], hi.values[i]) - m2 * u.values[i] - fi;
        num += w[i] * std::norm(r);
        den += w[i] * fi * fi;
    }
    return std::sqrt(num / den);
}

/// Branch of sqrt with 0 <= arg < pi.
inline cplx upper_sqrt(cplx w) {
    cplx s = std::sqrt(w);  // arg in (-pi/2, pi/2]
    if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
    return s;
}

/**
 * @brief int_0^R sin(r d)/(4 pi^2 d) [K+(mu) + s K-(mu)](|z|, |z'|) r dr,
 *        mu = sqrt(lambda^2 - r^2) on the branch 0 <= arg mu < pi, s = +1
 *        when z and z' lie on the same side of the brane.
 */
inline cplx truncated_kernel_4d(cplx lambda, double R, double x_dist, double z, double z_prime, bool same_side,
                                double rel_tol = 1e-8) {
    const double al = std::arg(lambda);
    if (!(al > 0.0 && al < kPi)) throw InvalidArgument("truncated_kernel_4d: need 0 < arg lambda < pi");
    if (!(R >= 0.0) || !(x_dist >= 0.0)) throw InvalidArgument("truncated_kernel_4d: R and distance must be non-negative");
    if (R == 0.0) return 0.0;
    const double sgn = same_side ? 1.0 : -1.0;
    const double az = std::abs(z), azp = std::abs(z_prime);
    auto integrand = [&](double r) -> cplx {
        const cplx mu2 = lambda * lambda - r * r;
        if (std::abs(mu2) < 1e-14) throw DomainViolation("truncated_kernel_4d: branch point on the path");
        const cplx mu = upper_sqrt(mu2);
        const double radial = (x_dist == 0.0) ? r : std::sin(r * x_dist) / x_dist;
        const cplx kp = kernel_parity_unrestricted(Parity::even, mu, az, azp);
        const cplx km = kernel_parity_unrestricted(Parity::odd, mu, az, azp);
        return radial / (4.0 * kPi * kPi) * (kp + sgn * km) * r;
    };
    cplx total = 0.0;
    const double split = lambda.real();
    std::vector<double> cuts{0.0};
    if (split > 0.0 && split < R) cuts.push_back(split);
    cuts.push_back(R);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const auto res = integrate_adaptive<cplx>(integrand, cuts[k], cuts[k + 1], rel_tol, 1e-300);
        if (!res.converged) throw NonConvergence("truncated_kernel_4d: quadrature did not converge");
        total += res.value;
    }
    return total;
}

/// Kernel values along a path on the logarithmic surface; points within
/// 1e-3 (Newton distance) of a zero of the denominator are rejected.
inline std::vector<cplx> continuation_probe(Parity p, const std::vector<RiemannPoint>& path, double z = 1.0,
                                            double z_prime = 2.0) {
    std::vector<cplx> out;
    out.reserve(path.size());
    const int a = detail::anchor_for(p);
    for (const RiemannPoint& m : path) {
        const cplx d = hankel(1, a, m);
        const cplx dd = hankel_derivative(1, a, m);
        if (std::abs(d) < 1e-3 * std::abs(dd))
            throw AtResonance("continuation_probe: path point within 1e-3 of a denominator zero");
        out.push_back(kernel_parity(p, m, z, z_prime));
    }
    return out;
}

}  // namespace volcano
