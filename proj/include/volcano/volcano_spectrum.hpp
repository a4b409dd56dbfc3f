#pragma once
/**
 * @file volcano_spectrum.hpp
 * @brief Zero mode and distorted continuum eigenfunctions of the half-line
 *        operators h+ (Robin, u'(0) + 1.5 u(0) = 0) and h- (Dirichlet) with
 *        potential 15/4 (1+z)^-2.
 *
 * With xi = 1 + z, x = m xi and a = H^(1)_1(m), b = H^(1)_2(m):
 *   u+(z, m) = sqrt(x) Im(conj(a) H^(1)_2(x)) / |a|
 *   u-(z, m) = sqrt(x) Im(conj(b) H^(1)_2(x)) / |b|
 * which is the real form of the complex Hankel expression; the complex form is
 * kept as the `raw` evaluators so realness can be policed.
 */

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "volcano/errors.hpp"
#include "volcano/parallel.hpp"
#include "volcano/quadrature.hpp"
#include "volcano/special_functions.hpp"

namespace volcano {

inline constexpr double kRobin = 1.5;
/// Below this value of m (1 + z) the Bessel/Neumann form is used.
inline constexpr double kSmallArgument = 0.1;
inline constexpr double kRealnessTolerance = 1e-10;

enum class Parity { even, odd };

inline const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

/// Zero mode (1 + |z|)^(-3/2).
inline double f0_eval(double z) { return std::pow(1.0 + std::abs(z), -1.5); }

/// Potential 15/4 (1 + |z|)^(-2) away from the brane.
inline double potential(double z) {
    const double s = 1.0 + std::abs(z);
    return 3.75 / (s * s);
}

namespace detail {

inline void check_mass(double m) {
    if (!std::isfinite(m) || m < 0.0) throw InvalidArgument("mass must be finite and non-negative");
}

inline int anchor_order(Parity p) { return p == Parity::even ? 1 : 2; }

/// sqrt(x) Im(conj(anchor) H^(1)_2(x)) / |anchor| using real J/Y values.
inline double mode_real_form(const std::array<double, 2>& jy_anchor, const std::array<double, 2>& jy_x, double x) {
    const double norm = std::hypot(jy_anchor[0], jy_anchor[1]);
    return std::sqrt(x) * (jy_anchor[0] * jy_x[1] - jy_anchor[1] * jy_x[0]) / norm;
}

/// Complex expression (1/2) sqrt(x) [conj(a) h - a conj(h)] / a * e^{i theta}.
inline cplx mode_complex_form(cplx a, cplx h, double x) {
    const cplx phase = std::polar(1.0, std::arg(a) - 0.5 * kPi);
    return 0.5 * std::sqrt(x) * (std::conj(a) * h - a * std::conj(h)) / a * phase;
}

}  // namespace detail

/// Complex-valued eigenfunction before taking the real part.
inline cplx mode_raw(Parity p, double z, double m) {
    detail::check_mass(m);
    if (z < 0.0) throw InvalidArgument("mode_raw: z must be non-negative");
    if (m == 0.0) return 0.0;
    const double x = m * (1.0 + z);
    const int nu = detail::anchor_order(p);
    const cplx a = hankel(1, nu, cplx(m, 0.0));
    const cplx h = hankel(1, 2, cplx(x, 0.0));
    return detail::mode_complex_form(a, h, x);
}

inline cplx u_plus_raw(double z, double m) { return mode_raw(Parity::even, z, m); }
inline cplx u_minus_raw(double z, double m) { return mode_raw(Parity::odd, z, m); }

/// Real eigenfunction u+ (even) or u- (odd) on the half line.
inline double mode_eval(Parity p, double z, double m) {
    detail::check_mass(m);
    if (z < 0.0) throw InvalidArgument("mode_eval: z must be non-negative");
    if (m == 0.0) return 0.0;
    if (p == Parity::odd && z == 0.0) return 0.0;
    const double x = m * (1.0 + z);
    const int nu = detail::anchor_order(p);
    if (x <= kSmallArgument)
        return detail::mode_real_form(bessel_jy(nu, m), bessel_jy(2, x), x);
    const cplx raw = mode_raw(p, z, m);
    if (std::abs(raw.imag()) > kRealnessTolerance)
        throw ConsistencyError("eigenfunction imaginary residue " + std::to_string(raw.imag()) + " at z=" +
                               std::to_string(z) + ", m=" + std::to_string(m));
    return raw.real();
}

inline double u_plus_eval(double z, double m) { return mode_eval(Parity::even, z, m); }
inline double u_minus_eval(double z, double m) { return mode_eval(Parity::odd, z, m); }

/// Extension to the full line: even u+(|z|) or odd sign(z) u-(|z|).
inline double mode_fullline(Parity p, double z, double m) {
    if (p == Parity::even) return u_plus_eval(std::abs(z), m);
    if (z == 0.0) return 0.0;
    return (z > 0.0 ? 1.0 : -1.0) * u_minus_eval(std::abs(z), m);
}

/// Boundary defect at z = 0: |u+'(0) + 1.5 u+(0)| from a fourth-order
/// one-sided stencil, or |u-(0)| for the odd sector.
inline double mode_boundary_residual(Parity p, double m, double dz = 1e-3) {
    detail::check_mass(m);
    if (p == Parity::odd) return std::abs(mode_raw(Parity::odd, 0.0, m).real());
    double v[5];
    for (int i = 0; i < 5; ++i) v[i] = mode_eval(Parity::even, i * dz, m);
    const double d = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * dz);
    return std::abs(d + kRobin * v[0]);
}

/// max over z in [2 dz, z_max - 2 dz] of |-u'' + V u - m^2 u|, second
/// derivative by the five-point stencil.
inline double mode_ode_residual(Parity p, double m, double z_max = 20.0, double dz = 1e-3) {
    detail::check_mass(m);
    const auto n = static_cast<std::size_t>(std::llround(z_max / dz));
    if (n < 5) throw InvalidArgument("mode_ode_residual: need at least five nodes");
    std::vector<double> u(n + 1);
    parallel_for(n + 1, [&](std::size_t i) { u[i] = mode_eval(p, i * dz, m); });
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 <= n; ++i) {
        const double d2 = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * dz * dz);
        worst = std::max(worst, std::abs(-d2 + (potential(i * dz) - m * m) * u[i]));
    }
    return worst;
}

/// Uniform grid 0, dz, ..., z_max.
inline std::vector<double> uniform_grid(double z_max, double dz) {
    if (!(dz > 0.0) || !(z_max > 0.0)) throw InvalidArgument("uniform_grid: positive extent and step required");
    const auto n = static_cast<std::size_t>(std::llround(z_max / dz));
    if (std::abs(n * dz - z_max) > 1e-9 * z_max) throw InvalidArgument("uniform_grid: z_max must be a multiple of dz");
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = i * dz;
    return g;
}

/// Mass rule: a geometrically refined panel on [0, 0.5] followed by uniform
/// Gauss-Legendre panels up to m_max. `nodes_per_panel` nodes are used per
/// top-level panel; the first panel spreads its nodes over 5 sub-panels.
inline QuadratureRule default_mass_rule(double m_max = 20.0, int panels = 8, int nodes_per_panel = 50) {
    if (!(m_max > 0.5) || panels < 2 || nodes_per_panel < 5)
        throw InvalidArgument("default_mass_rule: need m_max > 0.5, >= 2 panels, >= 5 nodes per panel");
    const std::vector<double> low = {0.0, 0.5 / 256, 0.5 / 64, 0.5 / 16, 0.5 / 4, 0.5};
    QuadratureRule rule = panel_rule(low, nodes_per_panel / 5);
    std::vector<double> br;
    for (int i = 0; i < panels; ++i) br.push_back(0.5 + (m_max - 0.5) * i / (panels - 1));
    const QuadratureRule high = panel_rule(br, nodes_per_panel);
    rule.nodes.insert(rule.nodes.end(), high.nodes.begin(), high.nodes.end());
    rule.weights.insert(rule.weights.end(), high.weights.begin(), high.weights.end());
    return rule;
}

/**
 * @brief Sampled eigenfunctions on a (z, m) grid, stored mass-major:
 *        value(z_i, m_k) = u[k * nz + i].
 */
struct ModeBasis {
    std::vector<double> z_grid;
    QuadratureRule m_rule;
    std::vector<double> u_plus;
    std::vector<double> u_minus;
    std::vector<double> f0;
    double max_imag_residue = 0.0;

    std::size_t nz() const { return z_grid.size(); }
    std::size_t nm() const { return m_rule.size(); }
    const std::vector<double>& m_grid() const { return m_rule.nodes; }
    const std::vector<double>& table(Parity p) const { return p == Parity::even ? u_plus : u_minus; }
    double at(Parity p, std::size_t iz, std::size_t im) const { return table(p)[im * nz() + iz]; }
};

/// Samples u+, u- and f0; parallel over masses.
inline ModeBasis build_mode_basis(std::vector<double> z_grid, QuadratureRule m_rule) {
    if (z_grid.size() < 2) throw PreconditionError("build_mode_basis: z grid needs at least two points");
    if (m_rule.size() < 1) throw PreconditionError("build_mode_basis: empty mass grid");
    for (std::size_t i = 1; i < z_grid.size(); ++i)
        if (!(z_grid[i] > z_grid[i - 1])) throw InvalidArgument("build_mode_basis: z grid must ascend");
    if (z_grid.front() < 0.0) throw InvalidArgument("build_mode_basis: z grid must be non-negative");
    for (double m : m_rule.nodes)
        if (!(m > 0.0)) throw InvalidArgument("build_mode_basis: masses must be positive");

    ModeBasis b;
    b.z_grid = std::move(z_grid);
    b.m_rule = std::move(m_rule);
    const std::size_t nz = b.nz(), nm = b.nm();
    b.u_plus.assign(nz * nm, 0.0);
    b.u_minus.assign(nz * nm, 0.0);
    b.f0.resize(nz);
    for (std::size_t i = 0; i < nz; ++i) b.f0[i] = f0_eval(b.z_grid[i]);

    std::vector<double> residue(nm, 0.0);
    parallel_for(nm, [&](std::size_t k) {
        const double m = b.m_rule.nodes[k];
        const auto jy1 = bessel_jy(1, m);
        const auto jy2 = bessel_jy(2, m);
        const cplx a(jy1[0], jy1[1]);
        const cplx c(jy2[0], jy2[1]);
        double worst = 0.0;
        for (std::size_t i = 0; i < nz; ++i) {
            const double x = m * (1.0 + b.z_grid[i]);
            const auto jyx = bessel_jy(2, x);
            if (x <= kSmallArgument) {
                b.u_plus[k * nz + i] = detail::mode_real_form(jy1, jyx, x);
                b.u_minus[k * nz + i] = detail::mode_real_form(jy2, jyx, x);
            } else {
                const cplx h(jyx[0], jyx[1]);
                const cplx up = detail::mode_complex_form(a, h, x);
                const cplx um = detail::mode_complex_form(c, h, x);
                b.u_plus[k * nz + i] = up.real();
                b.u_minus[k * nz + i] = um.real();
                worst = std::max({worst, std::abs(up.imag()), std::abs(um.imag())});
            }
            if (b.z_grid[i] == 0.0) b.u_minus[k * nz + i] = 0.0;
        }
        residue[k] = worst;
    });
    for (double r : residue) b.max_imag_residue = std::max(b.max_imag_residue, r);
    if (b.max_imag_residue > kRealnessTolerance)
        throw ConsistencyError("mode basis imaginary residue " + std::to_string(b.max_imag_residue));
    return b;
}

/// Basis on the documented default grids: dz = 1e-2 on [0, 60], 400 masses on [0, 20].
inline ModeBasis default_mode_basis() { return build_mode_basis(uniform_grid(60.0, 1e-2), default_mass_rule()); }

/// Outcome of one asymptotic-law check.
struct LawCheck {
    std::string name;
    double slope = 0.0;          ///< fitted log-log slope of residual vs driver
    double expected_slope = 0.0;
    double band = 0.0;           ///< allowed |slope - expected|
    double max_scaled_residual = 0.0;
    bool pass = false;
};

struct AsymptoticReport {
    std::vector<LawCheck> laws;
    bool all_pass() const {
        for (const auto& l : laws)
            if (!l.pass) return false;
        return !laws.empty();
    }
};

namespace detail {

/// Ordinary least-squares slope and intercept.
inline std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

}  // namespace detail

/// Low-mass law for u-: (1/8) m^{5/2} ((1+z)^{5/2} - (1+z)^{-3/2}). The sign is
/// the one produced by the defining Hankel expression.
inline double u_minus_low_mass(double z, double m) {
    const double xi = 1.0 + z;
    return 0.125 * std::pow(m, 2.5) * (std::pow(xi, 2.5) - std::pow(xi, -1.5));
}

/**
 * @brief Checks the four asymptotic laws of the eigenfunctions against the
 *        sampled basis.
 *
 *  - low mass, even: sup_{z<=R} |u+ + sqrt(m) f0| ~ m^{5/2} on [1e-3, 1e-1]
 *  - low mass, odd:  sup_{z<=R} |u- - u_minus_low_mass| ~ m^{9/2}
 *  - high mass:      sup_z |u+ + sqrt(2/pi) cos(mz)| + |u- - sqrt(2/pi) sin(mz)| <= C/m, m >= 5
 *  - far field:      |u - sqrt(2/pi) sin(mz + m - 5pi/4 - arg H)| <= C/(m z), z >= 10
 *
 * `window` is R, the z extent of the low-mass supremum.
 */
inline AsymptoticReport asymptotic_residuals(const ModeBasis& b, double window = 5.0) {
    if (b.nm() < 2) throw PreconditionError("asymptotic_residuals: mass grid needs several nodes");
    if (b.nz() < 2) throw PreconditionError("asymptotic_residuals: z grid needs several nodes");
    const auto& ms = b.m_grid();
    if (ms.front() > 1e-3 * 1.5 || ms.back() < 20.0 * 0.95)
        throw PreconditionError("asymptotic_residuals: mass grid must span [1e-3, 20]");
    if (b.z_grid.front() > 0.0 || b.z_grid.back() < 50.0)
        throw PreconditionError("asymptotic_residuals: z grid must span [0, 50]");

    const std::size_t nz = b.nz();
    const double amp = std::sqrt(2.0 / kPi);
    AsymptoticReport rep;

    // low-mass laws
    {
        std::vector<double> lx, ly_even, ly_odd;
        double scaled_even = 0.0, scaled_odd = 0.0;
        for (std::size_t k = 0; k < b.nm(); ++k) {
            const double m = ms[k];
            if (m < 1e-3 || m > 1e-1) continue;
            double re = 0.0, ro = 0.0;
            for (std::size_t i = 0; i < nz && b.z_grid[i] <= window; ++i) {
                const double z = b.z_grid[i];
                re = std::max(re, std::abs(b.at(Parity::even, i, k) + std::sqrt(m) * b.f0[i]));
                ro = std::max(ro, std::abs(b.at(Parity::odd, i, k) - u_minus_low_mass(z, m)));
            }
            lx.push_back(std::log(m));
            ly_even.push_back(std::log(re));
            ly_odd.push_back(std::log(ro));
            scaled_even = std::max(scaled_even, re / std::pow(m, 2.5));
            scaled_odd = std::max(scaled_odd, ro / std::pow(m, 4.5));
        }
        if (lx.size() < 3) throw PreconditionError("asymptotic_residuals: too few masses in [1e-3, 1e-1]");
        LawCheck e{"low_mass_even", detail::line_fit(lx, ly_even).first, 2.5, 0.2, scaled_even, false};
        e.pass = std::abs(e.slope - e.expected_slope) <= e.band;
        LawCheck o{"low_mass_odd", detail::line_fit(lx, ly_odd).first, 4.5, 0.3, scaled_odd, false};
        o.pass = std::abs(o.slope - o.expected_slope) <= o.band;
        rep.laws.push_back(e);
        rep.laws.push_back(o);
    }
    // high-mass law
    {
        std::vector<double> lx, ly;
        double c = 0.0;
        for (std::size_t k = 0; k < b.nm(); ++k) {
            const double m = ms[k];
            if (m < 5.0) continue;
            double r = 0.0;
            for (std::size_t i = 0; i < nz; ++i) {
                const double z = b.z_grid[i];
                r = std::max(r, std::abs(b.at(Parity::even, i, k) + amp * std::cos(m * z)) +
                                    std::abs(b.at(Parity::odd, i, k) - amp * std::sin(m * z)));
            }
            lx.push_back(std::log(m));
            ly.push_back(std::log(r));
            c = std::max(c, r * m);
        }
        LawCheck h{"high_mass", lx.size() >= 3 ? detail::line_fit(lx, ly).first : 0.0, -1.0, 0.3, c, false};
        h.pass = lx.size() >= 3 && h.slope <= h.expected_slope + h.band;
        rep.laws.push_back(h);
    }
    // far-field phase law, masses M <= m with M = 1
    {
        std::vector<double> phase_even(b.nm()), phase_odd(b.nm());
        for (std::size_t k = 0; k < b.nm(); ++k) {
            phase_even[k] = std::arg(hankel(1, 1, cplx(ms[k], 0.0)));
            phase_odd[k] = std::arg(hankel(1, 2, cplx(ms[k], 0.0)));
        }
        std::vector<double> lx, ly;
        double c = 0.0;
        for (std::size_t i = 0; i < nz; ++i) {
            const double z = b.z_grid[i];
            if (z < 10.0) continue;
            double r = 0.0;
            for (std::size_t k = 0; k < b.nm(); ++k) {
                const double m = ms[k];
                if (m < 1.0) continue;
                const double base = m * z + m - 1.25 * kPi;
                r = std::max(r, std::abs(b.at(Parity::even, i, k) - amp * std::sin(base - phase_even[k])));
                r = std::max(r, std::abs(b.at(Parity::odd, i, k) - amp * std::sin(base - phase_odd[k])));
            }
            lx.push_back(std::log(z));
            ly.push_back(std::log(r));
            c = std::max(c, r * z);
        }
        LawCheck f{"far_field", lx.size() >= 3 ? detail::line_fit(lx, ly).first : 0.0, -1.0, 0.3, c, false};
        f.pass = lx.size() >= 3 && std::abs(f.slope - f.expected_slope) <= f.band;
        rep.laws.push_back(f);
    }
    return rep;
}

}  // namespace volcano
