#pragma once
/**
 * @file evolution.hpp
 * @brief Reduced master equation u_tt + h u + xi^2 u = 0 on the full line:
 *        spectral propagation through the distorted transforms and a
 *        leapfrog FDTD solver on the even (Robin) / odd (Dirichlet) split.
 */

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "volcano/distorted_transform.hpp"
#include "volcano/errors.hpp"
#include "volcano/parallel.hpp"

namespace volcano {

/// Field and time derivative on the symmetric uniform grid z_i = (i - N) dz.
struct GridField {
    std::vector<double> z_grid;
    std::vector<double> u;
    std::vector<double> u_t;
    double time = 0.0;
    double cfl = 0.0;  ///< recorded by the FDTD solver, 0 for spectral output

    std::size_t half_size() const { return (z_grid.size() - 1) / 2; }  // N
    double dz() const { return z_grid[1] - z_grid[0]; }

    void validate() const {
        if (z_grid.size() < 5 || z_grid.size() % 2 == 0)
            throw InvalidArgument("GridField: need an odd number (>= 5) of nodes centred on 0");
        if (u.size() != z_grid.size() || u_t.size() != z_grid.size())
            throw InvalidArgument("GridField: array sizes differ");
        const std::size_t n = half_size();
        if (std::abs(z_grid[n]) > 1e-12) throw InvalidArgument("GridField: centre node must be z = 0");
        const double h = dz();
        for (std::size_t i = 1; i < z_grid.size(); ++i)
            if (std::abs(z_grid[i] - z_grid[i - 1] - h) > 1e-9 * h) throw InvalidArgument("GridField: grid not uniform");
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!std::isfinite(u[i]) || !std::isfinite(u_t[i])) throw InvalidArgument("GridField: non-finite sample");
    }
};

inline std::vector<double> symmetric_grid(double half_length, double dz) {
    const auto half = uniform_grid(half_length, dz);
    const std::size_t n = half.size() - 1;
    std::vector<double> g(2 * n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        g[n + i] = half[i];
        g[n - i] = -half[i];
    }
    return g;
}

/// Samples (u0, u1) on a symmetric grid.
template <class F0, class F1>
GridField sample_field(const std::vector<double>& grid, const F0& u0, const F1& u1) {
    GridField f;
    f.z_grid = grid;
    f.u.resize(grid.size());
    f.u_t.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f.u[i] = u0(grid[i]);
        f.u_t[i] = u1(grid[i]);
    }
    return f;
}

/// Half-line even and odd parts of full-line samples.
struct ParitySplit {
    std::vector<double> z;  // 0 .. L
    std::vector<double> even;
    std::vector<double> odd;
};

inline ParitySplit split_parity(const std::vector<double>& z_full, const std::vector<double>& v) {
    const std::size_t n = (z_full.size() - 1) / 2;
    ParitySplit s;
    s.z.assign(z_full.begin() + static_cast<std::ptrdiff_t>(n), z_full.end());
    s.even.resize(n + 1);
    s.odd.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        s.even[i] = 0.5 * (v[n + i] + v[n - i]);
        s.odd[i] = 0.5 * (v[n + i] - v[n - i]);
    }
    s.odd[0] = 0.0;
    return s;
}

inline std::vector<double> join_parity(const std::vector<double>& even, const std::vector<double>& odd) {
    const std::size_t n = even.size() - 1;
    std::vector<double> v(2 * n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        v[n + i] = even[i] + odd[i];
        v[n - i] = even[i] - odd[i];
    }
    return v;
}

/// Cos/sin coefficient pair of one parity sector.
struct SectorCoefficients {
    SpectralCoefficients cos_part;  ///< a(m): transform of the displacement
    SpectralCoefficients sin_part;  ///< b(m): transform of the velocity
};

/**
 * @brief Zero-mode amplitudes plus KK coefficients. For xi > 0 the zero mode
 *        is A e^{i xi t} + B e^{-i xi t}; for xi = 0 it moves secularly,
 *        c0 + c1 t.
 */
struct SpectralState {
    double xi = 0.0;
    cplx zero_a = 0.0;
    cplx zero_b = 0.0;
    double zero_c0 = 0.0;  ///< full-line overlap of the displacement with f0
    double zero_c1 = 0.0;  ///< full-line overlap of the velocity with f0
    bool secular_zero_mode = false;  ///< xi = 0 with a velocity overlap: linear growth
    SectorCoefficients kk_even;
    SectorCoefficients kk_odd;
};

namespace detail {

inline HalfLineFunction half_line(const std::vector<double>& z, const std::vector<double>& v) {
    HalfLineFunction f;
    f.z_grid = z;
    f.values = v;
    f.support_bound = z.back();
    return f;
}

/// Full-line overlap with the zero mode, int_R u f0 = 2 int_0^inf u_even f0
/// (the exact norm int_R f0^2 = 1 is used, not the truncated grid norm).
inline double zero_mode_coefficient(const HalfLineFunction& even) { return 2.0 * zero_mode_overlap(even); }

}  // namespace detail

/// Splits Cauchy data into zero-mode amplitudes and KK transforms. The basis
/// z grid must be the non-negative half of the data grid (or longer).
inline SpectralState decompose(const GridField& data, double xi, const ModeBasis& basis) {
    data.validate();
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw InvalidArgument("decompose: xi must be finite and >= 0");
    const ParitySplit s0 = split_parity(data.z_grid, data.u);
    const ParitySplit s1 = split_parity(data.z_grid, data.u_t);

    SpectralState st;
    st.xi = xi;
    const HalfLineFunction e0 = detail::half_line(s0.z, s0.even);
    const HalfLineFunction e1 = detail::half_line(s1.z, s1.even);
    const double c0 = detail::zero_mode_coefficient(e0);
    const double c1 = detail::zero_mode_coefficient(e1);
    st.zero_c0 = c0;
    st.zero_c1 = c1;
    if (xi > 0.0) {
        st.zero_a = 0.5 * cplx(c0, -c1 / xi);
        st.zero_b = 0.5 * cplx(c0, c1 / xi);
    } else {
        st.zero_a = st.zero_b = 0.5 * c0;
        st.secular_zero_mode = std::abs(c1) > 1e-12;
    }
    // F+ annihilates f0, so the raw even parts give the KK coefficients of
    // their zero-mode-free components without a (non-compact) projection.
    st.kk_even.cos_part = forward(Parity::even, e0, basis, false);
    st.kk_even.sin_part = forward(Parity::even, e1, basis, false);
    st.kk_odd.cos_part = forward(Parity::odd, detail::half_line(s0.z, s0.odd), basis);
    st.kk_odd.sin_part = forward(Parity::odd, detail::half_line(s1.z, s1.odd), basis);
    return st;
}

/// Zero-mode amplitude and its time derivative at time t.
inline std::pair<double, double> zero_mode_at(const SpectralState& s, double t) {
    if (s.xi > 0.0) {
        const cplx e = std::polar(1.0, s.xi * t);
        const cplx c = s.zero_a * e + s.zero_b * std::conj(e);
        const cplx d = cplx(0.0, s.xi) * (s.zero_a * e - s.zero_b * std::conj(e));
        return {c.real(), d.real()};
    }
    return {s.zero_c0 + s.zero_c1 * t, s.zero_c1};
}

namespace detail {

/// Time-evolved coefficients a(t), a'(t) of one sector at mass node k.
inline std::pair<double, double> evolve_node(const SectorCoefficients& c, std::size_t k, double m, double xi,
                                             double t) {
    const double w = std::sqrt(m * m + xi * xi);
    const double a = c.cos_part.values[k], b = c.sin_part.values[k];
    const double cs = std::cos(w * t), sn = std::sin(w * t);
    const double sinc = (w > 0.0) ? sn / w : t;
    return {a * cs + b * sinc, -a * w * sn + b * cs};
}

}  // namespace detail

/// Synthesises u(t), u_t(t) on the symmetric grid built from the first
/// `half_nodes` basis nodes (all when 0).
inline GridField spectral_propagate(const SpectralState& s, double t, const ModeBasis& basis,
                                    std::size_t half_nodes = 0) {
    if (half_nodes == 0 || half_nodes > basis.nz()) half_nodes = basis.nz();
    const std::size_t nm = basis.nm();
    std::vector<double> ae(nm), ae_t(nm), ao(nm), ao_t(nm);
    for (std::size_t k = 0; k < nm; ++k) {
        const double m = basis.m_grid()[k], w = basis.m_rule.weights[k];
        auto [e, et] = detail::evolve_node(s.kk_even, k, m, s.xi, t);
        auto [o, ot] = detail::evolve_node(s.kk_odd, k, m, s.xi, t);
        ae[k] = w * e;
        ae_t[k] = w * et;
        ao[k] = w * o;
        ao_t[k] = w * ot;
    }
    const auto [c, c_t] = zero_mode_at(s, t);
    std::vector<double> ue(half_nodes), ue_t(half_nodes), uo(half_nodes), uo_t(half_nodes);
    const std::size_t stride = basis.nz();
    parallel_for(half_nodes, [&](std::size_t i) {
        double se = 0, set = 0, so = 0, sot = 0;
        for (std::size_t k = 0; k < nm; ++k) {
            const double up = basis.u_plus[k * stride + i], um = basis.u_minus[k * stride + i];
            se += ae[k] * up;
            set += ae_t[k] * up;
            so += ao[k] * um;
            sot += ao_t[k] * um;
        }
        ue[i] = se + c * basis.f0[i];
        ue_t[i] = set + c_t * basis.f0[i];
        uo[i] = so;
        uo_t[i] = sot;
    });
    GridField f;
    const double h = basis.z_grid[1] - basis.z_grid[0];
    f.z_grid = symmetric_grid(basis.z_grid[half_nodes - 1], h);
    f.u = join_parity(ue, uo);
    f.u_t = join_parity(ue_t, uo_t);
    f.time = t;
    return f;
}

/// Energy carried by the spectral coefficients at time t:
/// |c'|^2 + xi^2 |c|^2 + 2 sum_sectors int (|a'(t)|^2 + w^2 |a(t)|^2) dm.
inline double coefficient_energy(const SpectralState& s, double t) {
    const auto [c, c_t] = zero_mode_at(s, t);
    double e = c_t * c_t + s.xi * s.xi * c * c;
    const auto& rule = s.kk_even.cos_part.m_rule;
    for (const SectorCoefficients* sec : {&s.kk_even, &s.kk_odd}) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const double m = rule.nodes[k];
            const double w2 = m * m + s.xi * s.xi;
            auto [a, a_t] = detail::evolve_node(*sec, k, m, s.xi, t);
            acc += rule.weights[k] * (a_t * a_t + w2 * a * a);
        }
        e += 2.0 * acc;
    }
    return e;
}

namespace detail {

/// Fourth-order first derivative on a uniform half-line grid (one-sided
/// five-point stencils at both ends).
inline std::vector<double> derivative4(const std::vector<double>& v, double h) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 5) throw PreconditionError("derivative4: need five samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n) {
            d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
        } else if (i < 2) {
            const double* p = v.data() + i;
            d[i] = (i == 0) ? (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12.0 * h)
                            : (-3.0 * p[-1] - 10.0 * p[0] + 18.0 * p[1] - 6.0 * p[2] + p[3]) / (12.0 * h);
        } else {
            const double* p = v.data() + i;
            d[i] = (i == n - 1) ? (25.0 * p[0] - 48.0 * p[-1] + 36.0 * p[-2] - 16.0 * p[-3] + 3.0 * p[-4]) / (12.0 * h)
                                : (3.0 * p[1] + 10.0 * p[0] - 18.0 * p[-1] + 6.0 * p[-2] - p[-3]) / (12.0 * h);
        }
    }
    return d;
}

/// End-corrected trapezoid weights (3/8, 7/6, 23/24, 1, ..., 23/24, 7/6, 3/8) h:
/// fourth order even when the integrand has a slope at the brane.
inline std::vector<double> energy_weights(const std::vector<double>& z) {
    const std::size_t n = z.size();
    if (n < 8) return grid_weights(z);
    const double h = z[1] - z[0];
    std::vector<double> w(n, h);
    const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (std::size_t i = 0; i < 3; ++i) w[i] = w[n - 1 - i] = ends[i] * h;
    return w;
}

inline double half_line_energy(const std::vector<double>& z, const std::vector<double>& u,
                               const std::vector<double>& u_t, double xi) {
    const double h = z[1] - z[0];
    const auto du = derivative4(u, h);
    const auto w = energy_weights(z);
    double e = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double twisted = du[i] + kRobin * u[i] / (1.0 + z[i]);
        e += w[i] * (u_t[i] * u_t[i] + twisted * twisted + xi * xi * u[i] * u[i]);
    }
    return e;
}

}  // namespace detail

/**
 * @brief int |u_t|^2 + |u' + 1.5 sign(z) (1+|z|)^-1 u|^2 + xi^2 |u|^2 dz.
 *
 * Evaluated sector by sector on the half line: the twisted derivative of the
 * even and odd parts have opposite parity, so cross terms vanish.
 */
inline double energy(const GridField& f, double xi) {
    f.validate();
    const ParitySplit s = split_parity(f.z_grid, f.u);
    const ParitySplit v = split_parity(f.z_grid, f.u_t);
    return 2.0 * (detail::half_line_energy(s.z, s.even, v.even, xi) + detail::half_line_energy(s.z, s.odd, v.odd, xi));
}

/// Same quadratic form written with the potential and the brane term:
/// int |u_t|^2 + |u'|^2 + (V + xi^2)|u|^2 dz - 3 |u(0)|^2.
inline double energy_with_brane_term(const GridField& f, double xi) {
    f.validate();
    const ParitySplit s = split_parity(f.z_grid, f.u);
    const ParitySplit v = split_parity(f.z_grid, f.u_t);
    const double h = f.dz();
    auto sector = [&](const std::vector<double>& u, const std::vector<double>& ut) {
        const auto du = detail::derivative4(u, h);
        const auto w = detail::energy_weights(s.z);
        double e = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            e += w[i] * (ut[i] * ut[i] + du[i] * du[i] + (potential(s.z[i]) + xi * xi) * u[i] * u[i]);
        return e;
    };
    const double u0 = s.even[0];
    return 2.0 * (sector(s.even, v.even) + sector(s.odd, v.odd)) - 3.0 * u0 * u0;
}

inline constexpr double kMaxCfl = 0.9;

/// Largest |z| where |u| or |u_t| exceeds `threshold` times the peak.
inline double field_support(const GridField& f, double threshold = 1e-12) {
    double peak = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i) peak = std::max({peak, std::abs(f.u[i]), std::abs(f.u_t[i])});
    double r = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i)
        if (std::abs(f.u[i]) > threshold * peak || std::abs(f.u_t[i]) > threshold * peak)
            r = std::max(r, std::abs(f.z_grid[i]));
    return r;
}

namespace detail {

/// Acceleration u'' - (V + xi^2) u with the Robin or Dirichlet condition at
/// z = 0 and u = 0 at the far end.
inline void accelerate(Boundary bc, const std::vector<double>& u, const std::vector<double>& mass2,
                       double inv_h2, double h, std::vector<double>& out) {
    const std::size_t n = u.size();
    if (bc == Boundary::robin) {
        const double ghost = u[1] + 2.0 * kRobin * h * u[0];
        out[0] = (u[1] - 2.0 * u[0] + ghost) * inv_h2 - mass2[0] * u[0];
    } else {
        out[0] = 0.0;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2 - mass2[i] * u[i];
    out[n - 1] = 0.0;
}

inline void verlet(Boundary bc, std::vector<double>& u, std::vector<double>& v, const std::vector<double>& mass2,
                   double h, double dt, std::size_t steps) {
    const std::size_t n = u.size();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> acc(n);
    if (bc == Boundary::dirichlet) u[0] = v[0] = 0.0;
    u[n - 1] = v[n - 1] = 0.0;
    accelerate(bc, u, mass2, inv_h2, h, acc);
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            v[i] += 0.5 * dt * acc[i];
            u[i] += dt * v[i];
        }
        accelerate(bc, u, mass2, inv_h2, h, acc);
        for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * dt * acc[i];
    }
}

}  // namespace detail

/**
 * @brief Leapfrog (velocity Verlet) evolution of the even part with the Robin
 *        ghost u_{-1} = u_1 + 3 dz u_0 and the odd part with u_0 = 0; both
 *        carry the potential and xi^2, and vanish at the far end.
 */
inline GridField fdtd_propagate(const GridField& data, double xi, double t_final, double cfl) {
    data.validate();
    if (!(cfl > 0.0) || cfl > kMaxCfl) throw InvalidArgument("fdtd_propagate: cfl must lie in (0, 0.9]");
    if (!(t_final >= 0.0)) throw InvalidArgument("fdtd_propagate: t_final must be non-negative");
    const double half_length = data.z_grid.back();
    const double support = field_support(data);
    if (half_length < support + t_final)
        throw PreconditionError("fdtd_propagate: domain half-length " + std::to_string(half_length) +
                                " shorter than support + t_final = " + std::to_string(support + t_final));
    const double h = data.dz();
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / (cfl * h) - 1e-12));
    const double dt = steps > 0 ? t_final / steps : 0.0;

    ParitySplit s = split_parity(data.z_grid, data.u);
    ParitySplit v = split_parity(data.z_grid, data.u_t);
    std::vector<double> mass2(s.z.size());
    for (std::size_t i = 0; i < s.z.size(); ++i) mass2[i] = potential(s.z[i]) + xi * xi;

    detail::verlet(Boundary::robin, s.even, v.even, mass2, h, dt, steps);
    detail::verlet(Boundary::dirichlet, s.odd, v.odd, mass2, h, dt, steps);

    GridField out;
    out.z_grid = data.z_grid;
    out.u = join_parity(s.even, s.odd);
    out.u_t = join_parity(v.even, v.odd);
    out.time = data.time + t_final;
    out.cfl = steps > 0 ? dt / h : cfl;
    return out;
}

/// Relative L2 difference of two fields on |z| <= radius, compared at the
/// nodes of the coarser grid (the finer spacing must divide the coarser).
inline double relative_l2_difference(const GridField& a, const GridField& b, double radius) {
    const GridField& coarse = a.dz() >= b.dz() ? a : b;
    const GridField& fine = a.dz() >= b.dz() ? b : a;
    const double ratio = coarse.dz() / fine.dz();
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - stride) > 1e-6) throw PreconditionError("relative_l2_difference: grids not nested");
    const std::size_t nc = coarse.half_size(), nf = fine.half_size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < coarse.z_grid.size(); ++i) {
        const double z = coarse.z_grid[i];
        if (std::abs(z) > radius + 1e-12) continue;
        const long off = static_cast<long>(i) - static_cast<long>(nc);
        const long j = static_cast<long>(nf) + off * static_cast<long>(stride);
        if (j < 0 || j >= static_cast<long>(fine.z_grid.size())) throw PreconditionError("relative_l2_difference: radius exceeds grid");
        const double d = coarse.u[i] - fine.u[static_cast<std::size_t>(j)];
        num += d * d;
        den += fine.u[static_cast<std::size_t>(j)] * fine.u[static_cast<std::size_t>(j)];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace volcano
