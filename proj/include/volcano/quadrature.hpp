#pragma once
// Quadrature rules shared by the spectral modules.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "volcano/errors.hpp"

namespace volcano {

/// Nodes and positive weights of a one-dimensional rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    double weight_sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n).
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

/// Composite Gauss-Legendre rule: `per_panel` nodes on every interval
/// [breaks[i], breaks[i+1]].
inline QuadratureRule panel_rule(const std::vector<double>& breaks, int per_panel) {
    if (breaks.size() < 2) throw InvalidArgument("panel_rule: need at least one panel");
    const QuadratureRule base = gauss_legendre(per_panel);
    QuadratureRule r;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (!(b > a)) throw InvalidArgument("panel_rule: breaks must increase");
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < base.size(); ++i) {
            r.nodes.push_back(mid + half * base.nodes[i]);
            r.weights.push_back(half * base.weights[i]);
        }
    }
    return r;
}

/// Uniform panels on [a, b].
inline QuadratureRule uniform_panel_rule(double a, double b, int panels, int per_panel) {
    std::vector<double> br(panels + 1);
    for (int i = 0; i <= panels; ++i) br[i] = a + (b - a) * i / panels;
    return panel_rule(br, per_panel);
}

/// Trapezoid weights for n uniformly spaced samples with step h.
inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
    if (n < 2) throw InvalidArgument("trapezoid_weights: need two samples");
    std::vector<double> w(n, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

namespace detail {

struct KronrodNodes {
    // 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
    static constexpr double x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <class T, class F>
std::pair<T, double> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T k = fc * KronrodNodes::wk[7];
    T g = fc * KronrodNodes::wg[3];
    for (int j = 0; j < 7; ++j) {
        const T s = f(c - h * KronrodNodes::x[j]) + f(c + h * KronrodNodes::x[j]);
        k += s * KronrodNodes::wk[j];
        if (j % 2 == 1) g += s * KronrodNodes::wg[j / 2];
    }
    return {k * h, std::abs(k * h - g * h)};
}

template <class T, class F>
T adaptive_recurse(const F& f, double a, double b, const T& whole, double err, double tol, int depth,
                   int& evaluations) {
    if (err <= tol || depth <= 0) {
        if (err > tol) evaluations = -1;
        return whole;
    }
    const double m = 0.5 * (a + b);
    auto [l, el] = gk15<T>(f, a, m);
    auto [r, er] = gk15<T>(f, m, b);
    if (evaluations >= 0) evaluations += 30;
    return adaptive_recurse<T>(f, a, m, l, el, 0.5 * tol, depth - 1, evaluations) +
           adaptive_recurse<T>(f, m, b, r, er, 0.5 * tol, depth - 1, evaluations);
}

}  // namespace detail

/// Result of an adaptive integration.
template <class T>
struct AdaptiveResult {
    T value;
    bool converged;
};

/// Adaptive Gauss-Kronrod (7/15) integration on [a, b] to an absolute
/// tolerance max(abs_tol, rel_tol * |estimate|).
template <class T, class F>
AdaptiveResult<T> integrate_adaptive(const F& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                                     int max_depth = 40) {
    if (a == b) return {T{}, true};
    auto [whole, err] = detail::gk15<T>(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    int evaluations = 15;
    const T v = detail::adaptive_recurse<T>(f, a, b, whole, err, tol, max_depth, evaluations);
    return {v, evaluations >= 0};
}

}  // namespace volcano
