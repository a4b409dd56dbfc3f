#pragma once
/**
 * @file distorted_transform.hpp
 * @brief Distorted Fourier transforms F+- (trapezoid in z, Gauss-Legendre
 *        panels in m), their inverses, the zero-mode projector and a
 *        fourth-order discrete application of h+-.
 */

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "volcano/errors.hpp"
#include "volcano/parallel.hpp"
#include "volcano/quadrature.hpp"
#include "volcano/volcano_spectrum.hpp"

namespace volcano {

/// Samples of a function on [0, z_max]; values vanish beyond support_bound.
struct HalfLineFunction {
    std::vector<double> z_grid;
    std::vector<double> values;
    double support_bound = 0.0;

    static HalfLineFunction sample(const std::vector<double>& grid, const auto& fn, double support) {
        HalfLineFunction f;
        f.z_grid = grid;
        f.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = grid[i] <= support ? fn(grid[i]) : 0.0;
        f.support_bound = std::min(support, grid.back());
        return f;
    }

    void validate() const {
        if (z_grid.size() != values.size()) throw InvalidArgument("HalfLineFunction: grid/value size mismatch");
        if (z_grid.size() < 2) throw InvalidArgument("HalfLineFunction: need at least two samples");
        if (support_bound > z_grid.back() + 1e-12) throw InvalidArgument("HalfLineFunction: support exceeds grid");
        for (double v : values)
            if (!std::isfinite(v)) throw InvalidArgument("HalfLineFunction: non-finite value");
    }
};

/// Coefficient function sampled at the nodes of a mass rule.
struct SpectralCoefficients {
    QuadratureRule m_rule;
    std::vector<double> values;
    Parity parity = Parity::odd;
    double tail_estimate = 0.0;  ///< max |value| on the last panel

    double l2_norm_squared() const {
        double s = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) s += m_rule.weights[k] * values[k] * values[k];
        return s;
    }
};

/// Trapezoid weights for a possibly non-uniform ascending grid.
inline std::vector<double> grid_weights(const std::vector<double>& z) {
    const std::size_t n = z.size();
    if (n < 2) throw InvalidArgument("grid_weights: need two nodes");
    std::vector<double> w(n);
    w[0] = 0.5 * (z[1] - z[0]);
    w[n - 1] = 0.5 * (z[n - 1] - z[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (z[i + 1] - z[i - 1]);
    return w;
}

/// Trapezoid inner product on the half line.
inline double inner_product(const HalfLineFunction& f, const std::vector<double>& g) {
    const auto w = grid_weights(f.z_grid);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f.values[i] * g[i];
    return s;
}

inline double l2_norm(const HalfLineFunction& f) { return std::sqrt(inner_product(f, f.values)); }

inline std::vector<double> sample_f0(const std::vector<double>& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f0_eval(grid[i]);
    return v;
}

/// Half-line overlap with the zero mode.
inline double zero_mode_overlap(const HalfLineFunction& f) { return inner_product(f, sample_f0(f.z_grid)); }

/**
 * @brief Removes the zero-mode component. The coefficient is normalised with
 *        the discrete norm of f0 on the same grid, so the result is orthogonal
 *        to f0 in the grid inner product up to rounding.
 */
inline HalfLineFunction project_out_zero_mode(const HalfLineFunction& f) {
    f.validate();
    const auto f0 = sample_f0(f.z_grid);
    const auto w = grid_weights(f.z_grid);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num += w[i] * f.values[i] * f0[i];
        den += w[i] * f0[i] * f0[i];
    }
    const double c = num / den;
    HalfLineFunction g = f;
    for (std::size_t i = 0; i < w.size(); ++i) g.values[i] -= c * f0[i];
    if (c != 0.0) g.support_bound = f.z_grid.back();
    return g;
}

inline constexpr double kOrthogonalityTolerance = 1e-8;

namespace detail {

inline std::size_t support_end(const HalfLineFunction& f) {
    std::size_t n = f.z_grid.size();
    while (n > 1 && f.z_grid[n - 1] > f.support_bound + 1e-12) --n;
    return n;
}

inline void check_grid_compatible(const HalfLineFunction& f, const ModeBasis& b) {
    if (f.z_grid.size() > b.nz()) throw PreconditionError("transform: function grid longer than basis grid");
    const std::size_t n = f.z_grid.size();
    if (std::abs(f.z_grid[0] - b.z_grid[0]) > 1e-12 || std::abs(f.z_grid[n - 1] - b.z_grid[n - 1]) > 1e-9)
        throw PreconditionError("transform: function grid must be a prefix of the basis grid");
}

inline void check_orthogonal(const HalfLineFunction& f) {
    const double overlap = zero_mode_overlap(f);
    if (std::abs(overlap) > kOrthogonalityTolerance * std::max(1.0, l2_norm(f)))
        throw DomainViolation("even transform needs data orthogonal to f0; overlap = " + std::to_string(overlap));
}

inline double last_panel_max(const std::vector<double>& v, std::size_t panel_nodes) {
    double t = 0.0;
    for (std::size_t k = v.size() > panel_nodes ? v.size() - panel_nodes : 0; k < v.size(); ++k)
        t = std::max(t, std::abs(v[k]));
    return t;
}

}  // namespace detail

/**
 * @brief F f(m_k) = int_0^inf f(z) u(z, m_k) dz by the trapezoid rule, using
 *        eigenfunctions sampled in `basis`.
 *
 * Even parity requires the data to be orthogonal to f0 (tolerance 1e-8)
 * unless `check_domain` is false.
 */
inline SpectralCoefficients forward(Parity p, const HalfLineFunction& f, const ModeBasis& basis,
                                    bool check_domain = true) {
    f.validate();
    detail::check_grid_compatible(f, basis);
    if (p == Parity::even && check_domain) detail::check_orthogonal(f);
    const std::size_t n = detail::support_end(f);
    auto w = grid_weights(f.z_grid);
    std::vector<double> fw(n);
    for (std::size_t i = 0; i < n; ++i) fw[i] = w[i] * f.values[i];

    SpectralCoefficients c;
    c.m_rule = basis.m_rule;
    c.parity = p;
    c.values.assign(basis.nm(), 0.0);
    const auto& table = basis.table(p);
    const std::size_t nz = basis.nz();
    parallel_for(basis.nm(), [&](std::size_t k) {
        const double* u = table.data() + k * nz;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += fw[i] * u[i];
        c.values[k] = s;
    });
    c.tail_estimate = detail::last_panel_max(c.values, 50);
    return c;
}

/// Forward transform at arbitrary masses, evaluating eigenfunctions on the fly.
inline std::vector<double> forward_direct(Parity p, const HalfLineFunction& f, const std::vector<double>& masses) {
    f.validate();
    const std::size_t n = detail::support_end(f);
    const auto w = grid_weights(f.z_grid);
    std::vector<double> out(masses.size(), 0.0);
    parallel_for(masses.size(), [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * f.values[i] * mode_eval(p, f.z_grid[i], masses[k]);
        out[k] = s;
    });
    return out;
}

/// Synthesis f(z_i) = sum_k W_k c_k u(z_i, m_k) on the first `nz` basis nodes.
inline HalfLineFunction inverse(const SpectralCoefficients& c, const ModeBasis& basis, std::size_t nz = 0) {
    if (c.values.size() != basis.nm()) throw PreconditionError("inverse: coefficient grid differs from basis");
    if (nz == 0 || nz > basis.nz()) nz = basis.nz();
    HalfLineFunction f;
    f.z_grid.assign(basis.z_grid.begin(), basis.z_grid.begin() + static_cast<std::ptrdiff_t>(nz));
    f.values.assign(nz, 0.0);
    f.support_bound = f.z_grid.back();
    const auto& table = basis.table(c.parity);
    const std::size_t stride = basis.nz();
    parallel_for(nz, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t k = 0; k < basis.nm(); ++k)
            s += c.m_rule.weights[k] * c.values[k] * table[k * stride + i];
        f.values[i] = s;
    });
    return f;
}

enum class Boundary { robin, dirichlet };

inline Boundary boundary_for(Parity p) { return p == Parity::even ? Boundary::robin : Boundary::dirichlet; }

/// Grid, potential samples and boundary condition of h+ or h-.
struct OperatorSample {
    std::vector<double> z_grid;
    std::vector<double> potential;
    Boundary boundary = Boundary::robin;

    static OperatorSample make(std::vector<double> grid, Boundary bc) {
        OperatorSample s;
        s.potential.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) s.potential[i] = volcano::potential(grid[i]);
        s.z_grid = std::move(grid);
        s.boundary = bc;
        return s;
    }
};

inline constexpr double kMaxOperatorStep = 0.05;

namespace detail {

/// Coefficients expressing the two ghost values u(-h), u(-2h) through a
/// degree-5 polynomial. Dirichlet: interpolation of u_0..u_5. Robin:
/// interpolation of u_0..u_4 plus the slope condition p'(0) = -1.5 h u_0.
struct GhostWeights {
    std::array<std::array<double, 6>, 2> w{};  // ghost k (k = 1, 2) from u_0..u_5
};

inline std::array<double, 6> solve6(std::array<std::array<double, 6>, 6> a, std::array<double, 6> b) {
    for (int c = 0; c < 6; ++c) {
        int piv = c;
        for (int r = c + 1; r < 6; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < 6; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 6; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<double, 6> x{};
    for (int r = 5; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < 6; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return x;
}

inline GhostWeights ghost_weights(Boundary bc, double h) {
    // Rows: conditions on p(t) = sum c_j t^j, t in units of h.
    std::array<std::array<double, 6>, 6> a{};
    const int interp = bc == Boundary::dirichlet ? 6 : 5;
    for (int r = 0; r < interp; ++r)
        for (int j = 0; j < 6; ++j) a[r][j] = std::pow(double(r), j);
    if (bc == Boundary::robin) {
        for (int j = 0; j < 6; ++j) a[5][j] = (j == 1) ? 1.0 : 0.0;
    }
    GhostWeights g;
    // ghost(t) = sum_j c_j t^j with c = A^{-1} rhs; rhs linear in data, so
    // probe with unit data vectors.
    for (int d = 0; d < 6; ++d) {
        std::array<double, 6> rhs{};
        if (bc == Boundary::dirichlet) {
            rhs[d] = 1.0;
        } else {
            if (d < 5) rhs[d] = 1.0;
            if (d == 0) rhs[5] = -kRobin * h;
            if (d == 5) continue;
        }
        const auto c = solve6(a, rhs);
        for (int k = 0; k < 2; ++k) {
            const double t = -(k + 1.0);
            double v = 0.0;
            for (int j = 5; j >= 0; --j) v = v * t + c[j];
            g.w[k][d] = v;
        }
    }
    return g;
}

}  // namespace detail

/**
 * @brief -f'' + V f by fourth-order central differences. Two ghost values
 *        below z = 0 come from the boundary condition; beyond the grid end the
 *        function is taken as zero.
 */
inline HalfLineFunction apply_h_discrete(const OperatorSample& s, const HalfLineFunction& f) {
    f.validate();
    const std::size_t n = f.z_grid.size();
    if (s.z_grid.size() < n) throw PreconditionError("apply_h_discrete: operator grid shorter than function grid");
    if (n < 6) throw PreconditionError("apply_h_discrete: need at least 6 samples");
    const double h = f.z_grid[1] - f.z_grid[0];
    if (h > kMaxOperatorStep) throw PreconditionError("apply_h_discrete: grid too coarse (dz > 0.05)");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(f.z_grid[i] - f.z_grid[i - 1] - h) > 1e-9 * h)
            throw PreconditionError("apply_h_discrete: grid must be uniform");

    const auto g = detail::ghost_weights(s.boundary, h);
    std::vector<double> ext(n + 4, 0.0);  // ext[i + 2] = u_i
    for (std::size_t i = 0; i < n; ++i) ext[i + 2] = f.values[i];
    for (int k = 0; k < 2; ++k) {
        double v = 0.0;
        for (int d = 0; d < 6; ++d) v += g.w[k][d] * f.values[d];
        ext[1 - k] = v;
    }
    HalfLineFunction out = f;
    out.support_bound = std::min(f.z_grid.back(), f.support_bound + 2 * h);
    const double inv = 1.0 / (12.0 * h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double* u = ext.data() + i + 2;
        const double d2 = (-u[-2] + 16.0 * u[-1] - 30.0 * u[0] + 16.0 * u[1] - u[2]) * inv;
        out.values[i] = -d2 + s.potential[i] * u[0];
    }
    return out;
}

/// || F(h f) - m^2 F(f) || / || m^2 F(f) || over the mass grid.
inline double multiplication_residual(Parity p, const HalfLineFunction& f, const ModeBasis& basis) {
    const OperatorSample s = OperatorSample::make(f.z_grid, boundary_for(p));
    const HalfLineFunction hf = apply_h_discrete(s, f);
    const SpectralCoefficients a = forward(p, hf, basis, false);
    const SpectralCoefficients b = forward(p, f, basis, false);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < basis.nm(); ++k) {
        const double m2 = basis.m_grid()[k] * basis.m_grid()[k];
        const double d = a.values[k] - m2 * b.values[k];
        num += basis.m_rule.weights[k] * d * d;
        den += basis.m_rule.weights[k] * m2 * m2 * b.values[k] * b.values[k];
    }
    if (den == 0.0) return 0.0;
    return std::sqrt(num / den);
}

}  // namespace volcano
