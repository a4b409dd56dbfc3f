#pragma once
/**
 * @file brane_observables.hpp
 * @brief Field on the brane (z = 0) for separable radial data, decay-rate
 *        fits, and brane quasimodes.
 *
 * Data Phi(x, z) = g(|x|) h(z) with h extended evenly. The brane value is
 *   Phi(t, r, 0) = c f0(0) phi_0(t, r) + int a(m) u+(0, m) phi_m(t, r) dm,
 * with c the zero-mode overlap of h, a = F+ h, and phi_m the radial
 * Klein-Gordon evolution of g with mass m.
 *
 * Two independent routes evaluate phi_m:
 *   - spectral: radial Fourier transform in k and a double (k, m) quadrature;
 *   - characteristic: with psi = r phi and G the odd extension of r g(r),
 *       psi_m = (G(r+t) + G(r-t))/2 - (m t/2) int G(s) J1(m rho)/rho ds,
 *     rho = sqrt(t^2 - (r-s)^2); the m integral is done first through the
 *     tabulated transform W(rho) = int m F(m) J1(m rho) dm.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "volcano/distorted_transform.hpp"
#include "volcano/errors.hpp"
#include "volcano/parallel.hpp"
#include "volcano/quadrature.hpp"
#include "volcano/special_functions.hpp"
#include "volcano/volcano_spectrum.hpp"

namespace volcano {

namespace detail {

/// J0 or J1 of a real non-negative argument, about 1e-13 absolute; power
/// series below 12, Hankel asymptotic expansion above.
inline double fast_bessel_j(int nu, double x) {
    if (x < 12.0) {
        const double q = -0.25 * x * x;
        double term = (nu == 0) ? 1.0 : 0.5 * x;
        double sum = term;
        for (int k = 1; k < 60; ++k) {
            term *= q / (k * (k + nu));
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
        }
        return sum;
    }
    const double mu = 4.0 * nu * nu;
    const double inv8x = 1.0 / (8.0 * x);
    double p = 1.0, q = 0.0, term = 1.0;
    for (int k = 1; k < 30; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (mu - odd * odd) * inv8x / k;
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        if (std::abs(term) < 1e-17) break;
        // alternating assignment: odd k feed Q, even k feed P with signs (-1)^{k/2}
        if (k % 2 == 1) {
            q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        } else {
            p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        }
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

/// Which Cauchy datum the separable profile sets (the other one is zero).
enum class DataRole { displacement, velocity };

struct SeparableData {
    std::function<double(double)> radial;  ///< g(r), r >= 0
    double radial_support = 0.0;           ///< g(r) = 0 for r >= radial_support
    HalfLineFunction z_profile;            ///< h(z) on z >= 0, even extension implied
    DataRole role = DataRole::displacement;

    void validate() const {
        if (!radial) throw InvalidArgument("SeparableData: radial profile missing");
        if (!(radial_support > 0.0)) throw InvalidArgument("SeparableData: radial support must be positive");
        z_profile.validate();
    }
};

/// Mode content of the z profile seen from the brane.
struct BraneSpectrum {
    double zero_mode = 0.0;        ///< c = int_R h f0 (exact f0 norm)
    QuadratureRule m_rule;
    std::vector<double> weight;    ///< F(m) = a(m) u+(0, m) at the rule nodes
};

/// Zero-mode coefficient and F(m) on the given mass rule, computed directly.
inline BraneSpectrum brane_spectrum(const HalfLineFunction& h, const QuadratureRule& m_rule) {
    h.validate();
    BraneSpectrum s;
    s.zero_mode = 2.0 * zero_mode_overlap(h);
    s.m_rule = m_rule;
    const auto a = forward_direct(Parity::even, h, m_rule.nodes);
    s.weight.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) s.weight[k] = a[k] * u_plus_eval(0.0, m_rule.nodes[k]);
    return s;
}

/**
 * @brief Same as brane_spectrum, but F is evaluated on Gauss panels of
 *        width `panel` and interpolated (degree 15 per panel) onto the
 *        target rule. F varies on the scale 1/(support of h).
 */
inline BraneSpectrum brane_spectrum_interpolated(const HalfLineFunction& h, const QuadratureRule& m_rule,
                                                 double panel = 0.25) {
    h.validate();
    if (m_rule.size() == 0) throw InvalidArgument("brane_spectrum_interpolated: empty mass rule");
    const double top = *std::max_element(m_rule.nodes.begin(), m_rule.nodes.end());
    const int panels = std::max(1, static_cast<int>(std::ceil(top / panel)));
    const int per = 16;
    const QuadratureRule coarse = uniform_panel_rule(0.0, panels * panel, panels, per);
    const BraneSpectrum c = brane_spectrum(h, coarse);
    // barycentric weights of the Gauss nodes on one panel
    std::vector<double> bw(per, 1.0), x(per);
    for (int i = 0; i < per; ++i) x[i] = coarse.nodes[i];
    for (int i = 0; i < per; ++i)
        for (int j = 0; j < per; ++j)
            if (i != j) bw[i] /= (x[i] - x[j]);
    BraneSpectrum s;
    s.zero_mode = c.zero_mode;
    s.m_rule = m_rule;
    s.weight.resize(m_rule.size());
    for (std::size_t k = 0; k < m_rule.size(); ++k) {
        const double m = m_rule.nodes[k];
        const int p = std::min(panels - 1, static_cast<int>(m / panel));
        const double shift = p * panel;
        double num = 0.0, den = 0.0;
        bool exact = false;
        for (int i = 0; i < per; ++i) {
            const double d = m - (x[i] + shift);
            if (d == 0.0) {
                s.weight[k] = c.weight[p * per + i];
                exact = true;
                break;
            }
            num += bw[i] / d * c.weight[p * per + i];
            den += bw[i] / d;
        }
        if (!exact) s.weight[k] = num / den;
    }
    return s;
}

/// Quadrature controls of the spectral route.
struct SpectralRouteOptions {
    double k_max = 20.0;
    int k_nodes = 400;
    double m_max = 20.0;
    int m_nodes = 400;
    /// extra nodes per unit of (t + r) so oscillations stay resolved
    double nodes_per_unit_time = 8.0;
};

/// Unitary radial transform ghat(k) = sqrt(2/pi) (1/k) int r sin(kr) g(r) dr.
inline std::vector<double> radial_transform(const std::function<double(double)>& g, double support,
                                            const std::vector<double>& k) {
    const QuadratureRule r = uniform_panel_rule(0.0, support, 32, 16);
    std::vector<double> out(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double x = r.nodes[i];
            const double kr = k[j] * x;
            const double sinc = (std::abs(kr) < 1e-8) ? x * x : x * std::sin(kr) / k[j];
            s += r.weights[i] * sinc * g(x);
        }
        out[j] = std::sqrt(2.0 / kPi) * s;
    }
    return out;
}

/// Result of a brane evaluation split into its two physical components.
struct BraneValue {
    double graviton = 0.0;
    double kk = 0.0;
    double total() const { return graviton + kk; }
    bool accuracy_warning = false;  ///< quadrature tail above 1e-3 of the value
    double tail_estimate = 0.0;
};

/**
 * @brief Phi(t, r, 0) by the double (k, m) quadrature. Node counts grow
 *        with t + r so the phases omega t and k r stay resolved.
 */
inline BraneValue brane_field(const SeparableData& data, double t, double r = 0.0,
                              const SpectralRouteOptions& opt = {}) {
    data.validate();
    if (!(t >= 0.0) || !(r >= 0.0)) throw InvalidArgument("brane_field: t and r must be non-negative");
    const double reach = t + r;
    const int kn = std::max(opt.k_nodes, static_cast<int>(opt.nodes_per_unit_time * reach * opt.k_max / kPi));
    const int mn = std::max(opt.m_nodes, static_cast<int>(opt.nodes_per_unit_time * t * opt.m_max / kPi));
    const int per = 16;
    const QuadratureRule kr = uniform_panel_rule(0.0, opt.k_max, (kn + per - 1) / per, per);
    const QuadratureRule mr = uniform_panel_rule(0.0, opt.m_max, (mn + per - 1) / per, per);
    const auto ghat = radial_transform(data.radial, data.radial_support, kr.nodes);
    const BraneSpectrum sp = brane_spectrum_interpolated(data.z_profile, mr);

    auto temporal = [&](double w) {
        if (data.role == DataRole::displacement) return std::cos(w * t);
        return w > 0.0 ? std::sin(w * t) / w : t;
    };
    std::vector<double> kweight(kr.size());
    for (std::size_t j = 0; j < kr.size(); ++j) {
        const double k = kr.nodes[j];
        const double x = k * r;
        const double j0 = std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
        kweight[j] = std::sqrt(2.0 / kPi) * kr.weights[j] * ghat[j] * j0 * k * k;
    }
    BraneValue v;
    double phi0 = 0.0;
    for (std::size_t j = 0; j < kr.size(); ++j) phi0 += kweight[j] * temporal(kr.nodes[j]);
    v.graviton = sp.zero_mode * f0_eval(0.0) * phi0;

    std::vector<double> per_mass(mr.size());
    parallel_for(mr.size(), [&](std::size_t q) {
        const double m = mr.nodes[q];
        double s = 0.0;
        for (std::size_t j = 0; j < kr.size(); ++j) s += kweight[j] * temporal(std::hypot(kr.nodes[j], m));
        per_mass[q] = mr.weights[q] * sp.weight[q] * s;
    });
    for (double x : per_mass) v.kk += x;

    // tail: size of the last k panel and last m panel contributions
    double tail = 0.0;
    for (std::size_t j = kr.size() - per; j < kr.size(); ++j) tail += std::abs(kweight[j]);
    double mt = 0.0;
    for (std::size_t q = mr.size() - per; q < mr.size(); ++q) mt += std::abs(per_mass[q]);
    v.tail_estimate = tail * std::abs(sp.zero_mode) + mt;
    v.accuracy_warning = v.tail_estimate > 1e-3 * std::abs(v.total());
    return v;
}

/// Options of the characteristic route.
struct CharacteristicOptions {
    double m_max = 20.0;
    double m_panel = 0.05;    ///< Gauss-Legendre panel width in m for W
    int m_panel_nodes = 12;
    double rho_step = 0.005;  ///< tabulation step of W
};

/**
 * @brief Brane field evaluator on the characteristic route. Built once per
 *        data set for all times up to t_max.
 */
class BraneCharacteristics {
public:
    BraneCharacteristics(const SeparableData& data, double t_max, const CharacteristicOptions& opt = {})
        : data_(data), opt_(opt) {
        data_.validate();
        if (!(t_max > 0.0)) throw InvalidArgument("BraneCharacteristics: t_max must be positive");
        const int panels = static_cast<int>(std::ceil(opt.m_max / opt.m_panel));
        const QuadratureRule mr = uniform_panel_rule(0.0, opt.m_max, panels, opt.m_panel_nodes);
        spectrum_ = brane_spectrum_interpolated(data_.z_profile, mr);
        kk_at_brane_ = 0.0;
        for (std::size_t q = 0; q < mr.size(); ++q) kk_at_brane_ += mr.weights[q] * spectrum_.weight[q];
        // masses whose weight is negligible are dropped from the table sums
        double peak = 0.0;
        for (double w : spectrum_.weight) peak = std::max(peak, std::abs(w));
        std::size_t used = mr.size();
        while (used > 0 && std::abs(spectrum_.weight[used - 1]) < 1e-13 * peak) --used;

        rho_max_ = t_max + 2.0 * data_.radial_support + 1.0;
        const auto n = static_cast<std::size_t>(std::ceil(rho_max_ / opt.rho_step)) + 3;
        table_.assign(n, 0.0);
        const bool disp = data_.role == DataRole::displacement;
        parallel_for(n, [&](std::size_t i) {
            const double rho = i * opt_.rho_step;
            double s = 0.0;
            for (std::size_t q = 0; q < used; ++q) {
                const double m = mr.nodes[q];
                const double x = m * rho;
                // displacement: W(rho)/rho = int m^2 F J1(m rho)/(m rho) dm
                // velocity:     W0(rho)   = int F J0(m rho) dm
                double kernel;
                if (disp) {
                    kernel = (x < 1e-6) ? 0.5 * m * m : m * m * bessel_j1_real(x) / x;
                } else {
                    kernel = bessel_j0_real(x);
                }
                s += mr.weights[q] * spectrum_.weight[q] * kernel;
            }
            table_[i] = s;
        });
    }

    /// Zero-mode and KK components of Phi(t, r, 0), r > 0.
    BraneValue at(double t, double r) const {
        if (!(r > 0.0)) throw InvalidArgument("BraneCharacteristics::at: r must be positive");
        if (t > rho_max_ - 2.0 * data_.radial_support) throw InvalidArgument("BraneCharacteristics::at: t beyond table");
        BraneValue v;
        const double grav_psi = free_wave(t, r);
        v.graviton = spectrum_.zero_mode * f0_eval(0.0) * grav_psi / r;
        double psi;
        if (data_.role == DataRole::displacement) {
            psi = 0.5 * (odd_ext(r + t) + odd_ext(r - t)) * kk_at_brane_ - 0.5 * t * cone_integral(t, r);
        } else {
            psi = 0.5 * cone_integral(t, r);
        }
        v.kk = psi / r;
        return v;
    }

    double zero_mode() const { return spectrum_.zero_mode; }
    double kk_at_brane() const { return kk_at_brane_; }

    /// J1 and J0 for real non-negative arguments (series / asymptotic).
    static double bessel_j1_real(double x) { return x < 1e-300 ? 0.0 : real_j(1, x); }
    static double bessel_j0_real(double x) { return real_j(0, x); }

private:
    static double real_j(int nu, double x) { return detail::fast_bessel_j(nu, x); }

    double odd_ext(double s) const {
        const double a = std::abs(s);
        if (a >= data_.radial_support) return 0.0;
        return s * data_.radial(a);
    }

    double free_wave(double t, double r) const {
        if (data_.role == DataRole::displacement) return 0.5 * (odd_ext(r + t) + odd_ext(r - t));
        // 0.5 int_{r-t}^{r+t} G(s) ds
        const double lo = std::max(-data_.radial_support, r - t), hi = std::min(data_.radial_support, r + t);
        if (hi <= lo) return 0.0;
        auto f = [&](double s) { return odd_ext(s); };
        return 0.5 * integrate_adaptive<double>(f, lo, hi, 1e-12, 1e-16).value;
    }

    double table_at(double rho) const {
        const double x = rho / opt_.rho_step;
        auto i = static_cast<std::size_t>(x);
        if (i + 2 >= table_.size()) throw RangeError("BraneCharacteristics: rho outside table");
        const double f = x - i;
        // cubic through i-1..i+2 (reflect at 0: the tabulated functions are even in rho)
        const double p0 = (i == 0) ? table_[1] : table_[i - 1];
        const double p1 = table_[i], p2 = table_[i + 1], p3 = table_[i + 2];
        return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)));
    }

    /// int over |r - s| < t of G(s) K(rho), K the tabulated kernel; the
    /// light-cone edge is resolved with s = edge +- u^2.
    double cone_integral(double t, double r) const {
        const double R = data_.radial_support;
        const double lo = std::max(-R, r - t), hi = std::min(R, r + t);
        if (hi <= lo) return 0.0;
        auto integrand_s = [&](double s) {
            const double d = r - s;
            const double rho2 = t * t - d * d;
            return odd_ext(s) * table_at(std::sqrt(std::max(rho2, 0.0)));
        };
        const bool lower_edge = r - t > -R;
        const bool upper_edge = r + t < R;
        // composite Gauss-Legendre in a variable x in [0, span]; panels follow
        // the phase change m_max * delta(rho) so every oscillation is resolved
        auto composite = [&](auto&& f, double span, double rho_a, double rho_b) {
            const double phase = opt_.m_max * std::abs(rho_b - rho_a);
            const int panels = 2 + static_cast<int>(std::ceil(phase / 2.0));
            const QuadratureRule& gl = gl16();
            const double w = span / panels;
            double acc = 0.0;
            for (int p = 0; p < panels; ++p)
                for (std::size_t i = 0; i < gl.size(); ++i)
                    acc += 0.5 * w * gl.weights[i] * f(p * w + 0.5 * w * (gl.nodes[i] + 1.0));
            return acc;
        };
        auto rho_of = [&](double s) { return std::sqrt(std::max(t * t - (r - s) * (r - s), 0.0)); };
        auto mapped_from_lower = [&](double a, double b) {
            // s = a + u^2
            auto f = [&](double u) { return 2.0 * u * integrand_s(a + u * u); };
            return composite(f, std::sqrt(b - a), rho_of(a), rho_of(b));
        };
        auto mapped_from_upper = [&](double a, double b) {
            auto f = [&](double u) { return 2.0 * u * integrand_s(b - u * u); };
            return composite(f, std::sqrt(b - a), rho_of(b), rho_of(a));
        };
        if (lower_edge && upper_edge) {
            const double mid = 0.5 * (lo + hi);
            return mapped_from_lower(lo, mid) + mapped_from_upper(mid, hi);
        }
        if (lower_edge) return mapped_from_lower(lo, hi);
        if (upper_edge) return mapped_from_upper(lo, hi);
        // rho is not monotone where s passes r; split there
        auto plain = [&](double a, double b) {
            auto f = [&](double x) { return integrand_s(a + x); };
            return composite(f, b - a, rho_of(a), rho_of(b));
        };
        if (r > lo && r < hi) return plain(lo, r) + plain(r, hi);
        return plain(lo, hi);
    }

    static const QuadratureRule& gl16() {
        static const QuadratureRule rule = gauss_legendre(16);
        return rule;
    }

    SeparableData data_;
    CharacteristicOptions opt_;
    BraneSpectrum spectrum_;
    double kk_at_brane_ = 0.0;
    double rho_max_ = 0.0;
    std::vector<double> table_;
};

/// Supremum over the transverse radius of each component at time t; the
/// radius grid is fine near the light cone r ~ t and coarse inside it.
struct BraneSup {
    double graviton = 0.0;
    double kk = 0.0;
    double total = 0.0;
};

inline BraneSup brane_sup(const BraneCharacteristics& ch, double t, double radial_support,
                          double front_step = 0.01, double inner_step = 0.25) {
    std::vector<double> rs;
    const double front_lo = std::max(0.0, t - radial_support - 2.0), front_hi = t + radial_support;
    for (double r = inner_step; r < front_lo; r += inner_step) rs.push_back(r);
    for (double r = std::max(front_lo, front_step); r <= front_hi; r += front_step) rs.push_back(r);
    std::vector<BraneValue> vals(rs.size());
    parallel_for(rs.size(), [&](std::size_t i) { vals[i] = ch.at(t, rs[i]); });
    BraneSup s;
    for (const auto& v : vals) {
        s.graviton = std::max(s.graviton, std::abs(v.graviton));
        s.kk = std::max(s.kk, std::abs(v.kk));
        s.total = std::max(s.total, std::abs(v.total()));
    }
    return s;
}

/// Least-squares slope of log|value| against log t on a window.
struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    std::size_t points = 0;
};

inline SlopeFit decay_exponent_fit(const std::vector<std::pair<double, double>>& series, double t_min,
                                   double t_max) {
    std::vector<double> x, y;
    for (const auto& [t, v] : series) {
        if (t < t_min || t > t_max) continue;
        if (!(v > 0.0)) throw InvalidArgument("decay_exponent_fit: non-positive value inside the window");
        if (!(t > 0.0)) throw InvalidArgument("decay_exponent_fit: time must be positive");
        x.push_back(std::log(t));
        y.push_back(std::log(v));
    }
    if (x.size() < 10) throw PreconditionError("decay_exponent_fit: fewer than 10 points in the window");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    const double icept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - icept - f.slope * x[i];
        ssr += e * e;
    }
    f.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
    f.points = x.size();
    return f;
}

// ---------------------------------------------------------------------------
// Quasimodes

/// Exact separated solution built on a zero zeta of H^(kind)_nu.
struct Quasimode {
    int nu = 1;       ///< 1: even profile, 2: odd profile
    int kind = 1;
    cplx zeta = 0.0;  ///< principal-sheet Hankel zero
    double omega4 = 1.0;

    void validate() const {
        if (nu != 1 && nu != 2) throw InvalidArgument("Quasimode: nu must be 1 or 2");
        if (kind != 1 && kind != 2) throw InvalidArgument("Quasimode: kind must be 1 or 2");
        if (!(omega4 > 0.0 && omega4 <= 1.0)) throw InvalidArgument("Quasimode: omega4 must lie in (0, 1]");
        if (zeta == cplx(0.0)) throw InvalidArgument("Quasimode: zeta must be non-zero");
    }
};

/// sqrt(1+|z|) H^(kind)_2(zeta (1+|z|)), times sign(z) for the odd profile.
inline cplx quasimode_profile(const Quasimode& q, double z) {
    q.validate();
    const double xi = 1.0 + std::abs(z);
    const cplx v = std::sqrt(xi) * hankel(q.kind, 2, q.zeta * xi);
    if (q.nu == 1) return v;
    if (z == 0.0) return 0.0;
    return (z > 0.0 ? 1.0 : -1.0) * v;
}

/// lambda^2 = xi^2 + zeta^2.
inline cplx dispersion_lambda_squared(const Quasimode& q, double xi) { return xi * xi + q.zeta * q.zeta; }

/// Boundary residual of the even profile, |u'(0+) + 1.5 u(0)| from a
/// fourth-order one-sided stencil, or |u(0+)| for the odd profile.
inline double quasimode_boundary_residual(const Quasimode& q, double dz = 1e-3) {
    q.validate();
    if (q.nu == 2) return std::abs(hankel(q.kind, 2, q.zeta));  // value at 0+ must vanish
    cplx p[5];
    for (int i = 0; i < 5; ++i) p[i] = quasimode_profile(q, i * dz);
    const cplx d = (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12.0 * dz);
    return std::abs(d + kRobin * p[0]);
}

/**
 * @brief max over interior nodes of |(-lambda^2 + xi^2 + h) u| with the
 *        second derivative by a three-point stencil, on z in (0, z_max].
 *        Returned relative to max |u| on the same nodes.
 */
inline double quasimode_residual(const Quasimode& q, double xi, double dz = 1e-3, double z_max = 10.0) {
    q.validate();
    const cplx lam2 = dispersion_lambda_squared(q, xi);
    const auto n = static_cast<std::size_t>(std::llround(z_max / dz));
    std::vector<cplx> u(n + 1);
    for (std::size_t i = 0; i <= n; ++i) u[i] = quasimode_profile(q, i * dz);
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double z = i * dz;
        const cplx d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (dz * dz);
        const cplx r = -lam2 * u[i] + xi * xi * u[i] - d2 + potential(z) * u[i];
        worst = std::max(worst, std::abs(r));
        peak = std::max(peak, std::abs(u[i]));
    }
    return worst / peak;
}

}  // namespace volcano
