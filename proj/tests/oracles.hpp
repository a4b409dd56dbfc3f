#pragma once
// Reference evaluations used only by the tests. They share no code with the
// library: plain long-double power series and the Hankel asymptotic series.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using lcplx = std::complex<long double>;
using cplx = std::complex<double>;

inline constexpr long double kPiL = std::numbers::pi_v<long double>;
inline constexpr long double kGammaL = std::numbers::egamma_v<long double>;

inline long double factorial(int n) {
    long double f = 1.0L;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// J_n(z) = sum_k (-1)^k / (k! (n+k)!) (z/2)^(n+2k), fixed 60 terms.
inline cplx bessel_j(int n, cplx zd) {
    const lcplx z(zd.real(), zd.imag());
    const lcplx h = z / 2.0L;
    lcplx term = std::pow(h, n) / factorial(n);
    lcplx sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= -(h * h) / static_cast<long double>(k * (n + k));
        sum += term;
    }
    return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

/// Y_n (n >= 1) with log(z/2) = ln(|z|/2) + i*arg, arg taken as given so any
/// sheet of the logarithm can be requested:
///   pi Y_n = 2 J_n log(z/2) - sum_{k<n} (n-k-1)!/k! (z/2)^(2k-n)
///            - sum_k (psi(k+1) + psi(n+k+1)) (-z^2/4)^k (z/2)^n / (k! (n+k)!)
inline cplx bessel_y(int n, double modulus, double arg) {
    const lcplx z = std::polar<long double>(modulus, arg);
    const lcplx h = z / 2.0L;
    const lcplx log_half(std::log(static_cast<long double>(modulus) / 2.0L), arg);
    lcplx j = 0.0L;
    {
        lcplx term = std::pow(h, n) / factorial(n);
        j = term;
        for (int k = 1; k < 60; ++k) {
            term *= -(h * h) / static_cast<long double>(k * (n + k));
            j += term;
        }
    }
    lcplx finite = 0.0L;
    for (int k = 0; k < n; ++k) finite += factorial(n - k - 1) / factorial(k) * std::pow(h, 2 * k - n);
    auto psi = [](int m) {  // digamma at positive integer m
        long double s = -kGammaL;
        for (int i = 1; i < m; ++i) s += 1.0L / i;
        return s;
    };
    lcplx tail = 0.0L;
    lcplx power = std::pow(h, n) / factorial(n);  // (z/2)^n / (0! n!)
    for (int k = 0; k < 60; ++k) {
        tail += (psi(k + 1) + psi(n + k + 1)) * power;
        power *= -(h * h) / static_cast<long double>((k + 1) * (n + k + 1));
    }
    const lcplx y = (2.0L * j * log_half - finite - tail) / kPiL;
    return {static_cast<double>(y.real()), static_cast<double>(y.imag())};
}

/// H^(1)_n = J_n + i Y_n on the sheet fixed by `arg`.
inline cplx hankel1(int n, double modulus, double arg) {
    const cplx z = std::polar(modulus, arg);
    return bessel_j(n, z) + cplx(0.0, 1.0) * bessel_y(n, modulus, arg);
}

/// Hankel asymptotic series for |z| large, |arg z| < pi:
///   H^(1)_n(z) ~ sqrt(2/(pi z)) e^{i(z - n pi/2 - pi/4)} sum_k i^k a_k / z^k,
///   a_k = prod_{j=1..k} (4n^2 - (2j-1)^2) / (k! 8^k).
inline cplx hankel1_asymptotic(int n, cplx zd, int terms = 30) {
    const lcplx z(zd.real(), zd.imag());
    const long double mu = 4.0L * n * n;
    lcplx sum = 1.0L, term = 1.0L;
    const lcplx i(0.0L, 1.0L);
    for (int k = 1; k < terms; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        const lcplx next = term * i * (mu - odd * odd) / (8.0L * k * z);
        if (std::abs(next) > std::abs(term)) break;  // asymptotic: stop at the smallest term
        term = next;
        sum += term;
    }
    const lcplx phase = std::exp(i * (z - n * kPiL / 2.0L - kPiL / 4.0L));
    const lcplx v = std::sqrt(2.0L / (kPiL * z)) * phase * sum;
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

/// Relative distance |a - b| / |b|.
inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

/// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(const F& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

}  // namespace oracle
