#pragma once
/**
 * @file special_functions.hpp
 * @brief Bessel, Neumann and Hankel functions of small integer order on the
 *        logarithmic Riemann surface.
 *
 * Evaluation strategy for H^(1)_nu / H^(2)_nu, nu in {1, 2}:
 *
 *   - every point of the surface is first reduced to a principal-sheet value,
 *     and principal values in the left half-plane are rotated by a multiple of
 *     pi into the closed right half-plane w (Re w >= 0);
 *   - for |w| >= 13 the Hankel asymptotic expansion is summed up to its
 *     smallest term (optimal truncation);
 *   - for |w| <= 11 the recessive function (H^(1) in the upper half-plane,
 *     H^(2) in the lower) comes from the integral representation of K_nu,
 *     the dominant one from the J/Y power series;
 *   - in between both are blended with a smooth weight;
 *   - the rotation back uses the continuation relation
 *        H1(w e^{-i m pi}) = (-1)^{m nu} ((m+1) H1(w) + m H2(w)),
 *        H2(w e^{-i m pi}) = (-1)^{m nu} ((1-m) H2(w) - m H1(w)).
 */

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>

#include "volcano/errors.hpp"

namespace volcano {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Radius where evaluation switches from convergent series to the asymptotic
/// expansion (blended over +-1). The overlap annulus [10, 14] is checked in
/// the tests.
inline constexpr double kSwitchRadius = 12.0;
/// J_nu series refuses arguments beyond this modulus.
inline constexpr double kSeriesMaxModulus = 20.0;
/// Largest |sheet| for which Hankel continuation is offered.
inline constexpr int kMaxSheet = 3;

namespace detail {

inline double wrap_to_pi(double a) {
    double w = std::remainder(a, 2.0 * kPi);  // in [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

inline void require_finite(cplx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw RangeError(std::string(what) + ": result not representable");
}

}  // namespace detail

/**
 * @brief A point of the universal cover of C*, stored as modulus and an
 *        unbounded argument.
 *
 * Sheet s holds arguments in (-pi + 2 pi s, pi + 2 pi s]; sheet 0 is the
 * principal sheet, sheet -1 is (-3pi, -pi].
 */
class RiemannPoint {
public:
    RiemannPoint(double modulus, double argument) : modulus_(modulus), argument_(argument) {
        if (!(modulus > 0.0) || !std::isfinite(modulus) || !std::isfinite(argument))
            throw InvalidArgument("RiemannPoint: modulus must be positive and finite");
    }

    /// Point on the principal sheet with the given value.
    static RiemannPoint principal(cplx z) { return RiemannPoint(std::abs(z), std::arg(z)); }

    /// Point whose projection to C* is `projection`, lifted to sheet `sheet`.
    static RiemannPoint on_sheet(cplx projection, int sheet) {
        return RiemannPoint(std::abs(projection), std::arg(projection) + 2.0 * kPi * sheet);
    }

    double modulus() const { return modulus_; }
    double argument() const { return argument_; }

    int sheet_index() const { return static_cast<int>(std::ceil((argument_ - kPi) / (2.0 * kPi))); }

    double principal_argument() const { return argument_ - 2.0 * kPi * sheet_index(); }

    cplx principal_value() const { return std::polar(modulus_, principal_argument()); }

    /// Reflection z -> conj(z) on the surface (argument changes sign).
    RiemannPoint conj() const { return RiemannPoint(modulus_, -argument_); }

    RiemannPoint rotated(double angle) const { return RiemannPoint(modulus_, argument_ + angle); }

    /// Multiplication by a positive real factor.
    RiemannPoint scaled(double factor) const {
        if (!(factor > 0.0)) throw InvalidArgument("RiemannPoint::scaled: factor must be positive");
        return RiemannPoint(modulus_ * factor, argument_);
    }

private:
    double modulus_;
    double argument_;
};

/// Which machinery evaluates a principal right-half-plane Hankel value.
enum class HankelPath { automatic, small_argument, large_argument };

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Power series of J_nu; `nu` in 0..3.
inline cplx j_series(int nu, cplx z) {
    const cplx half = 0.5 * z;
    const cplx q = -half * half;
    cplx term = std::pow(half, nu) / factorial(nu);
    cplx sum = term;
    double biggest = std::abs(term);
    for (int n = 1; n < 200; ++n) {
        term *= q / (double(n) * double(n + nu));
        sum += term;
        const double a = std::abs(term);
        biggest = std::max(biggest, a);
        if (a <= 1e-17 * std::max(std::abs(sum), 1e-3 * biggest)) break;
    }
    return sum;
}

/// Neumann-type expansion of Y_n, n in {1, 2}, with log(z/2) supplied so the
/// caller decides which sheet the logarithm lives on.
inline cplx y_series(int n, cplx z, cplx log_half_z, cplx jn) {
    const cplx half = 0.5 * z;
    cplx finite = 0.0;
    for (int k = 0; k < n; ++k)
        finite += factorial(n - k - 1) / factorial(k) * std::pow(half, 2 * k - n);

    const cplx q = -half * half;
    // psi(k+1) + psi(n+k+1) with psi(j+1) = -gamma + H_j
    double hk = 0.0;
    double hnk = 0.0;
    for (int j = 1; j <= n; ++j) hnk += 1.0 / j;
    cplx pw = std::pow(half, n) / factorial(n);
    cplx sum = (hk + hnk - 2.0 * kEulerGamma) * pw;
    double biggest = std::abs(sum);
    for (int k = 1; k < 200; ++k) {
        pw *= q / (double(k) * double(n + k));
        hk += 1.0 / k;
        hnk += 1.0 / (n + k);
        const cplx term = (hk + hnk - 2.0 * kEulerGamma) * pw;
        sum += term;
        const double a = std::abs(term);
        biggest = std::max(biggest, a);
        if (a <= 1e-17 * std::max(std::abs(sum), 1e-3 * biggest)) break;
    }
    return (-finite + 2.0 * log_half_z * jn - sum) / kPi;
}

/// K_nu(x) for Re x > 0 by the trapezoid rule on the integral of
/// exp(-x cosh t) cosh(nu t); the integrand is entire so the rule converges
/// geometrically in the step.
inline cplx k_integral(int nu, cplx x) {
    const double rx = x.real();
    double t_max = 0.0;
    while (rx * (std::cosh(t_max) - 1.0) - nu * t_max < 42.0) t_max += 0.25;
    auto f = [&](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); };

    double h = 0.25;
    int n = static_cast<int>(std::ceil(t_max / h));
    cplx sum = 0.5 * f(0.0);
    double mass = 0.5 * std::abs(sum) * 2.0;
    for (int i = 1; i <= n; ++i) {
        const cplx v = f(i * h);
        sum += v;
        mass += std::abs(v);
    }
    cplx estimate = h * sum;
    // the integrand oscillates when Im x is large; roundoff is then set by
    // int |f| rather than by the (smaller) result
    for (int level = 0; level < 14; ++level) {
        cplx odd = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx v = f((i + 0.5) * h);
            odd += v;
            mass += std::abs(v);
        }
        sum += odd;
        h *= 0.5;
        n *= 2;
        const cplx refined = h * sum;
        const double scale = std::max(std::abs(refined), h * mass);
        if (std::abs(refined - estimate) <= 4e-16 * scale) return refined;
        estimate = refined;
    }
    return estimate;
}

/// Optimally truncated sum sum_k i^k a_k(nu) / w^k of the Hankel expansion.
inline cplx h1_asymptotic_sum(int nu, cplx w) {
    const double mu = 4.0 * nu * nu;
    const cplx iw = cplx(0.0, 1.0) / w;
    cplx term = 1.0;
    cplx sum = 1.0;
    double last = 1.0;
    for (int k = 1; k < 80; ++k) {
        const double odd = 2.0 * k - 1.0;
        const cplx next = term * iw * ((mu - odd * odd) / (8.0 * k));
        const double a = std::abs(next);
        if (a == 0.0) break;
        if (a > last) break;
        term = next;
        sum += term;
        last = a;
        if (a < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

/// Optimally truncated Hankel expansion of H^(1)_nu at w (|arg w| <= pi/2).
inline cplx h1_asymptotic(int nu, cplx w) {
    const cplx phase = w - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * w)) * std::exp(cplx(0.0, 1.0) * phase) * h1_asymptotic_sum(nu, w);
}

/// H^(1)_nu(w) * exp(-i w) from the asymptotic expansion; the exponential
/// is never formed, so nothing under- or overflows for large Im w.
inline cplx h1_asymptotic_scaled(int nu, cplx w) {
    return std::sqrt(2.0 / (kPi * w)) * std::exp(-cplx(0.0, 1.0) * (0.5 * nu + 0.25) * kPi) *
           h1_asymptotic_sum(nu, w);
}

/// H^(1)_nu at a principal value with Re w >= 0 from the convergent
/// machinery (power series, or the K integral for the recessive branch).
inline cplx h1_small(int nu, cplx w) {
    if (w.imag() > 1.5) {
        // H1_nu(w) = (2/pi) i^{-(nu+1)} K_nu(-i w)
        const cplx factor = (nu == 1) ? cplx(-1.0, 0.0) : cplx(0.0, 1.0);
        return (2.0 / kPi) * factor * k_integral(nu, cplx(0.0, -1.0) * w);
    }
    const cplx j = j_series(nu, w);
    const cplx y = y_series(nu, w, std::log(0.5 * w), j);
    return j + cplx(0.0, 1.0) * y;
}

/// Half-width of the band around kSwitchRadius where both machineries are
/// blended with a C2 weight, so evaluated values have no jump at the switch.
inline constexpr double kBlendHalfWidth = 1.0;

/// H^(1)_nu at a principal value with Re w >= 0.
inline cplx h1_right(int nu, cplx w, HankelPath path) {
    if (path == HankelPath::large_argument) return h1_asymptotic(nu, w);
    if (path == HankelPath::small_argument) return h1_small(nu, w);
    const double r = std::abs(w);
    if (r >= kSwitchRadius + kBlendHalfWidth) return h1_asymptotic(nu, w);
    if (r <= kSwitchRadius - kBlendHalfWidth) return h1_small(nu, w);
    const double s = (r - (kSwitchRadius - kBlendHalfWidth)) / (2.0 * kBlendHalfWidth);
    const double weight = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    return (1.0 - weight) * h1_small(nu, w) + weight * h1_asymptotic(nu, w);
}

struct HankelPair {
    cplx h1;
    cplx h2;
};

/// Both kinds at a principal value w with Re w >= 0; H2 is evaluated as the
/// mirror image of H1 so conjugation symmetry holds bit-for-bit.
inline HankelPair principal_right_pair(int nu, cplx w, HankelPath path) {
    const cplx h1 = h1_right(nu, w, path);
    const cplx h2 = std::conj(h1_right(nu, std::conj(w), path));
    return {h1, h2};
}

/// Both kinds on the principal sheet (arg in (-pi, pi]).
inline HankelPair principal_pair(int nu, double modulus, double arg, HankelPath path) {
    const int m = -static_cast<int>(std::lround(arg / kPi));
    if (m == 0) return principal_right_pair(nu, std::polar(modulus, arg), path);
    const cplx w = std::polar(modulus, arg + m * kPi);
    const HankelPair p = principal_right_pair(nu, w, path);
    const double s = ((m * nu) % 2 == 0) ? 1.0 : -1.0;
    return {s * (double(m + 1) * p.h1 + double(m) * p.h2), s * (double(1 - m) * p.h2 - double(m) * p.h1)};
}

inline void check_order(int nu) {
    if (nu != 1 && nu != 2) throw InvalidArgument("Hankel order must be 1 or 2");
}

inline void check_kind(int kind) {
    if (kind != 1 && kind != 2) throw InvalidArgument("Hankel kind must be 1 or 2");
}

inline void check_sheet(const RiemannPoint& z) {
    const int s = z.sheet_index();
    if (s < -kMaxSheet || s > kMaxSheet)
        throw UnsupportedSheet("sheet " + std::to_string(s) + " is outside the validated range [-3, 3]");
}

}  // namespace detail

/// Bessel function of the first kind by its power series; entire, so the
/// argument is a plain complex number.
inline cplx bessel_j(int order, cplx z) {
    if (order < 0 || order > 3) throw InvalidArgument("bessel_j: order must be in 0..3");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("bessel_j: non-finite argument");
    if (std::abs(z) > kSeriesMaxModulus)
        throw NonConvergence("bessel_j: |z| beyond the series disk, use the asymptotic path");
    return detail::j_series(order, z);
}

/// Neumann function Y_n (n = 1, 2) at a point of the log surface; the log(z)
/// term uses the full surface argument.
inline cplx bessel_y(int order, const RiemannPoint& z) {
    detail::check_order(order);
    cplx result;
    if (z.modulus() < kSwitchRadius) {
        const cplx zc = z.principal_value();
        const cplx log_half = cplx(std::log(0.5 * z.modulus()), z.argument());
        result = detail::y_series(order, zc, log_half, detail::j_series(order, zc));
    } else {
        detail::check_sheet(z);
        // Y = (H1 - H2) / (2i) with both continued to the same sheet
        const int s = z.sheet_index();
        const detail::HankelPair p = detail::principal_pair(order, z.modulus(), z.principal_argument(), HankelPath::automatic);
        const int mm = -2 * s;
        const double sg = ((mm * order) % 2 == 0) ? 1.0 : -1.0;
        const cplx h1 = sg * (double(mm + 1) * p.h1 + double(mm) * p.h2);
        const cplx h2 = sg * (double(1 - mm) * p.h2 - double(mm) * p.h1);
        result = (h1 - h2) / cplx(0.0, 2.0);
    }
    detail::require_finite(result, "bessel_y");
    return result;
}

/**
 * @brief H^(1)_nu on a non-principal sheet from principal-sheet values,
 *        H1(p e^{-i m pi}) = (-1)^{m nu} ((m+1) H1(p) + m conj(H1(conj p))),
 *        m = -2 * sheet.
 *
 * Kind 2 follows from the reflection H2(z) = conj(H1(conj z)). Sheet 0 is
 * accepted and reduces to the principal value.
 */
inline cplx hankel_on_sheet(int order, const RiemannPoint& z, int kind = 1) {
    detail::check_order(order);
    detail::check_kind(kind);
    detail::check_sheet(z);
    const RiemannPoint target = (kind == 1) ? z : z.conj();
    detail::check_sheet(target);
    const int m = -2 * target.sheet_index();
    const double pa = target.principal_argument();
    const detail::HankelPair at_p = detail::principal_pair(order, target.modulus(), pa, HankelPath::automatic);
    const detail::HankelPair at_conj = detail::principal_pair(order, target.modulus(), -pa == -kPi ? kPi : -pa,
                                                              HankelPath::automatic);
    const cplx h1 = double(m + 1) * at_p.h1 + double(m) * std::conj(at_conj.h1);
    const double sg = ((m * order) % 2 == 0) ? 1.0 : -1.0;
    const cplx value = sg * h1;
    detail::require_finite(value, "hankel_on_sheet");
    return (kind == 1) ? value : std::conj(value);
}

/// Hankel function H^(kind)_order at any point of sheets -3..3.
inline cplx hankel(int kind, int order, const RiemannPoint& z) {
    detail::check_order(order);
    detail::check_kind(kind);
    detail::check_sheet(z);
    if (z.sheet_index() != 0) return hankel_on_sheet(order, z, kind);
    const detail::HankelPair p = detail::principal_pair(order, z.modulus(), z.argument(), HankelPath::automatic);
    const cplx value = (kind == 1) ? p.h1 : p.h2;
    detail::require_finite(value, "hankel");
    return value;
}

/// Principal-sheet Hankel function of a complex argument.
inline cplx hankel(int kind, int order, cplx z) {
    if (z == cplx(0.0)) throw InvalidArgument("hankel: z = 0 is not on the surface");
    return hankel(kind, order, RiemannPoint::principal(z));
}

/// Principal-sheet value with a forced evaluation path; used to cross-check
/// the two machineries in their overlap annulus.
inline cplx hankel_via(HankelPath path, int kind, int order, cplx z) {
    detail::check_order(order);
    detail::check_kind(kind);
    if (z == cplx(0.0)) throw InvalidArgument("hankel_via: z = 0 is not on the surface");
    const detail::HankelPair p = detail::principal_pair(order, std::abs(z), std::arg(z), path);
    return (kind == 1) ? p.h1 : p.h2;
}

/// H^(kind)_order(z) * exp(-+ i z) (minus for kind 1), the scaled Hankel
/// function; exponent factored out where the asymptotic path applies.
inline cplx hankel_scaled(int kind, int order, cplx z) {
    detail::check_order(order);
    detail::check_kind(kind);
    if (z == cplx(0.0)) throw InvalidArgument("hankel_scaled: z = 0 is not on the surface");
    const cplx i(0.0, 1.0);
    if (std::abs(z) >= kSwitchRadius) {
        auto sc1 = [&](cplx w) { return detail::h1_asymptotic_scaled(order, w); };
        auto sc2 = [&](cplx w) { return std::conj(detail::h1_asymptotic_scaled(order, std::conj(w))); };
        if (z.real() >= 0.0) return kind == 1 ? sc1(z) : sc2(z);
        // half-turn continuation from w = -z with the exponentials combined;
        // every factor e^{+-2iw} that appears has modulus <= 1
        const cplx w = -z;
        const double sg = (order % 2 == 0) ? 1.0 : -1.0;
        if (z.imag() > 0.0) {  // w in the lower right quadrant
            if (kind == 1) return -sg * sc2(w);
            return sg * (2.0 * sc2(w) * std::exp(-2.0 * i * w) + sc1(w));
        }
        if (kind == 1) return sg * (2.0 * sc1(w) * std::exp(2.0 * i * w) + sc2(w));
        return -sg * sc1(w);
    }
    const cplx h = hankel(kind, order, z);
    return h * std::exp((kind == 1 ? -i : i) * z);
}

/// d/dz H^(kind)_order(z) from the order recurrences
///   H1' = H1/z - H2,   H2' = H1 - 2 H2 / z   (orders as subscripts).
inline cplx hankel_derivative(int kind, int order, const RiemannPoint& z) {
    detail::check_order(order);
    const cplx zc = z.principal_value();
    const cplx h1 = hankel(kind, 1, z);
    const cplx h2 = hankel(kind, 2, z);
    return (order == 1) ? h1 / zc - h2 : h1 - 2.0 * h2 / zc;
}

inline cplx hankel_derivative(int kind, int order, cplx z) {
    return hankel_derivative(kind, order, RiemannPoint::principal(z));
}

/// max over the grid and over orders 1, 2 of
/// |H1 H2' - H2 H1' + 4i/(pi z)| * |z|.
inline double wronskian_residual(std::span<const RiemannPoint> z_grid) {
    if (z_grid.empty()) throw InvalidArgument("wronskian_residual: empty grid");
    double worst = 0.0;
    for (const RiemannPoint& z : z_grid) {
        const cplx zc = z.principal_value();
        for (int nu = 1; nu <= 2; ++nu) {
            const cplx w = hankel(1, nu, z) * hankel_derivative(2, nu, z) -
                           hankel(2, nu, z) * hankel_derivative(1, nu, z);
            worst = std::max(worst, std::abs(w + cplx(0.0, 4.0) / (kPi * zc)) * z.modulus());
        }
    }
    return worst;
}

/// Real-axis Bessel pair (J_nu(x), Y_nu(x)) for x > 0, nu in {1, 2}; fast path
/// used by the eigenfunction tables.
inline std::array<double, 2> bessel_jy(int order, double x) {
    detail::check_order(order);
    if (!(x > 0.0)) throw InvalidArgument("bessel_jy: x must be positive");
    const cplx h = detail::h1_right(order, cplx(x, 0.0), HankelPath::automatic);
    return {h.real(), h.imag()};
}

}  // namespace volcano
