#pragma once
/**
 * @file scattering_matrix.hpp
 * @brief One-dimensional scattering matrices, numeric phase shifts, and the
 *        scattering amplitudes with their continuation in the frequency.
 *
 *   s+(m) = -i e^{2im} H^(2)_1(m) / H^(1)_1(m)   (even sector)
 *   s-(m) = +i e^{2im} H^(2)_2(m) / H^(1)_2(m)   (odd sector)
 *
 * The eigenfunctions behave like sqrt(2/pi) sin(m z + delta) with
 * delta = m - 5 pi/4 - arg H^(1)_a(m), so exp(2 i delta) and s differ by a
 * constant sign per sector; the constant is measured, not assumed.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "volcano/errors.hpp"
#include "volcano/parallel.hpp"
#include "volcano/special_functions.hpp"
#include "volcano/volcano_spectrum.hpp"

namespace volcano {

namespace detail {

inline int sector_order(Parity p) { return p == Parity::even ? 1 : 2; }
inline cplx sector_sign(Parity p) { return p == Parity::even ? cplx(0.0, -1.0) : cplx(0.0, 1.0); }

/// Distance (one Newton step) from m to the nearest zero of H^(1)_order.
inline double newton_distance(int order, const RiemannPoint& m) {
    const cplx h = hankel(1, order, m);
    const cplx d = hankel_derivative(1, order, m);
    return std::abs(h) / std::max(std::abs(d), 1e-300);
}

}  // namespace detail

/// Denominator zeros closer than this make s_hat refuse.
inline constexpr double kScatteringPoleGuard = 1e-6;

/// s+/- at a real positive mass; the exponentials are combined through the
/// scaled Hankel functions so large m stays accurate.
inline cplx s_hat(Parity p, double m) {
    if (!(m > 0.0)) throw InvalidArgument("s_hat: m must be positive");
    const int a = detail::sector_order(p);
    // e^{2im} H2/H1 = S2 e^{-im} e^{2im} / (S1 e^{im}) = S2 / S1
    const cplx num = hankel_scaled(2, a, cplx(m, 0.0));
    const cplx den = hankel_scaled(1, a, cplx(m, 0.0));
    return detail::sector_sign(p) * num / den;
}

/// s+/- continued to a point of the logarithmic surface.
inline cplx s_hat(Parity p, const RiemannPoint& m) {
    const int a = detail::sector_order(p);
    if (detail::newton_distance(a, m) < kScatteringPoleGuard)
        throw AtResonance("s_hat: m is at a zero of the denominator");
    const cplx mc = m.principal_value();
    const cplx e = std::exp(cplx(0.0, 2.0) * mc);
    return detail::sector_sign(p) * e * hankel(2, a, m) / hankel(1, a, m);
}

/// Limit of s as m -> 0+: H^(2)/H^(1) -> -1.
inline cplx s_hat_low_energy_limit(Parity p) { return -detail::sector_sign(p); }

/// Scattering amplitude at real sigma != 0 and direction component omega4.
inline cplx amplitude(double sigma, double omega4, Parity p) {
    if (sigma == 0.0 || !std::isfinite(sigma)) throw InvalidArgument("amplitude: sigma must be non-zero");
    if (!(std::abs(omega4) <= 1.0)) throw InvalidArgument("amplitude: |omega4| must not exceed 1");
    const double x = std::abs(sigma) * std::abs(omega4);
    const cplx s = (x == 0.0) ? s_hat_low_energy_limit(p) : s_hat(p, x);
    return sigma > 0.0 ? s : 1.0 / s;
}

/// Amplitude of the positive-frequency branch continued to complex sigma.
inline cplx amplitude(const RiemannPoint& sigma, double omega4, Parity p) {
    if (!(std::abs(omega4) > 0.0 && std::abs(omega4) <= 1.0))
        throw InvalidArgument("amplitude: continued amplitude needs 0 < |omega4| <= 1");
    return s_hat(p, sigma.scaled(std::abs(omega4)));
}

/// delta = m - 5 pi/4 - arg H^(1)_a(m), reduced to [0, pi).
inline double phase_shift_closed_form(Parity p, double m) {
    const cplx h = hankel(1, detail::sector_order(p), cplx(m, 0.0));
    const double d = m - 1.25 * kPi - std::arg(h);
    double r = std::fmod(d, kPi);
    if (r < 0.0) r += kPi;
    return r;
}

struct PhaseFit {
    double delta = 0.0;      ///< in [0, pi)
    double amplitude = 0.0;
    double residual = 0.0;   ///< rms misfit / amplitude
};

namespace detail {

/// Solve the normal equations of a small least-squares problem.
template <std::size_t N>
std::array<double, N> least_squares(const std::vector<std::array<double, N>>& rows, const std::vector<double>& y) {
    std::array<std::array<double, N + 1>, N> a{};
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) a[i][j] += rows[r][i] * rows[r][j];
            a[i][N] += rows[r][i] * y[r];
        }
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < N; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        if (std::abs(a[c][c]) < 1e-300) throw NonConvergence("least_squares: singular normal equations");
        for (std::size_t r = 0; r < N; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= N; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = 0; i < N; ++i) x[i] = a[i][N] / a[i][i];
    return x;
}

}  // namespace detail

/**
 * @brief Fit of the sampled eigenfunction on [z1, z2] by
 *        sum_k (1+z)^{-k} (A_k sin(mz) + B_k cos(mz)), k = 0..3; the phase
 *        is read off the k = 0 pair. The decaying terms absorb the 1/x
 *        corrections of the Hankel asymptotics, which a bare sinusoid fit
 *        would turn into a phase error of order 1/(m z).
 */
inline PhaseFit phase_shift_numeric(Parity p, double m, double z1, double z2, std::size_t samples = 2000) {
    if (!(m > 0.0)) throw InvalidArgument("phase_shift_numeric: m must be positive");
    if (!(z1 >= 10.0 / m)) throw PreconditionError("phase_shift_numeric: window must start at z >= 10/m");
    if (!(z2 - z1 >= 3.0 * 2.0 * kPi / m)) throw PreconditionError("phase_shift_numeric: window must span 3 periods");
    constexpr std::size_t N = 8;
    std::vector<std::array<double, N>> rows(samples);
    std::vector<double> y(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double z = z1 + (z2 - z1) * i / (samples - 1);
        const double s = std::sin(m * z), c = std::cos(m * z);
        double w = 1.0;
        for (std::size_t k = 0; k < N / 2; ++k) {
            rows[i][2 * k] = w * s;
            rows[i][2 * k + 1] = w * c;
            w /= (1.0 + z);
        }
        y[i] = mode_eval(p, z, m);
    }
    const auto x = detail::least_squares<N>(rows, y);
    PhaseFit f;
    f.amplitude = std::hypot(x[0], x[1]);
    double d = std::atan2(x[1], x[0]);
    d = std::fmod(d, kPi);
    if (d < 0.0) d += kPi;
    f.delta = d;
    double ss = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double model = 0.0;
        for (std::size_t k = 0; k < N; ++k) model += rows[i][k] * x[k];
        ss += (y[i] - model) * (y[i] - model);
    }
    f.residual = std::sqrt(ss / samples) / f.amplitude;
    if (f.residual > 0.05) throw RangeError("phase_shift_numeric: poor fit, window not in the asymptotic regime");
    return f;
}

/// e^{2 i delta_numeric} / s(m): the convention constant of the sector.
inline cplx phase_convention_constant(Parity p, double m, double z1, double z2) {
    const PhaseFit f = phase_shift_numeric(p, m, z1, z2);
    return std::exp(cplx(0.0, 2.0 * f.delta)) / s_hat(p, m);
}

/// max over masses and both sectors of ||s| - 1|.
inline double unitarity_scan(const std::vector<double>& masses) {
    if (masses.empty()) throw InvalidArgument("unitarity_scan: empty grid");
    for (double m : masses)
        if (!(m > 0.0)) throw InvalidArgument("unitarity_scan: masses must be positive");
    std::vector<double> dev(masses.size());
    parallel_for(masses.size(), [&](std::size_t i) {
        dev[i] = std::max(std::abs(std::abs(s_hat(Parity::even, masses[i])) - 1.0),
                          std::abs(std::abs(s_hat(Parity::odd, masses[i])) - 1.0));
    });
    return *std::max_element(dev.begin(), dev.end());
}

}  // namespace volcano
