#pragma once
/**
 * @file resonance_finder.hpp
 * @brief Zeros of H^(kind)_nu (nu = 1, 2) on the principal and second
 *        sheets: Newton refinement, argument-principle counting, seeded
 *        sweeps, and the resonance rays through each zero.
 */

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "volcano/errors.hpp"
#include "volcano/special_functions.hpp"

namespace volcano {

struct Resonance {
    int nu = 1;
    int kind = 1;
    int sheet = 0;
    cplx position;          ///< projection to the complex plane
    double residual = 0.0;  ///< |H| at the refined point
    std::string source = "seeded";

    RiemannPoint point() const { return RiemannPoint::on_sheet(position, sheet); }
};

/// One row of the published zero table (kind 1).
struct TableZero {
    int nu = 1;
    int sheet = 0;
    cplx value;
};

namespace detail {

/// "a+bi" / "a-bi" with either '.' or ',' as decimal separator.
inline cplx parse_complex_token(std::string tok) {
    std::replace(tok.begin(), tok.end(), ',', '.');
    if (tok.empty() || tok.back() != 'i') throw InvalidArgument("zero table: value must end in 'i': " + tok);
    tok.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = tok.size(); k-- > 1;) {
        if ((tok[k] == '+' || tok[k] == '-') && tok[k - 1] != 'e' && tok[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) throw InvalidArgument("zero table: cannot split real and imaginary parts: " + tok);
    try {
        std::size_t used = 0;
        const std::string re = tok.substr(0, split), im = tok.substr(split);
        const double a = std::stod(re, &used);
        if (used != re.size()) throw InvalidArgument("zero table: bad real part: " + re);
        const double b = std::stod(im, &used);
        if (used != im.size()) throw InvalidArgument("zero table: bad imaginary part: " + im);
        return {a, b};
    } catch (const std::logic_error&) {
        throw InvalidArgument("zero table: bad number in " + tok);
    }
}

}  // namespace detail

/// Parse rows "nu sheet value"; '#' starts a comment.
inline std::vector<TableZero> parse_zero_table(std::istream& in) {
    std::vector<TableZero> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        TableZero z;
        std::string value;
        if (!(row >> z.nu)) continue;
        if (!(row >> z.sheet >> value)) throw InvalidArgument("zero table: incomplete row: " + line);
        if (z.nu != 1 && z.nu != 2) throw InvalidArgument("zero table: nu must be 1 or 2");
        z.value = detail::parse_complex_token(value);
        out.push_back(z);
    }
    return out;
}

/// The published table, shipped also as data/hankel_zeros_table.txt.
inline const char* kZeroTableText = R"(
1  0  -0,419-0,577i
1  0  -3,832-0,355i
1  0  -7,016-0,349i
1  0  -10,173-0,348i
1  0  -13,326-0,348i
1 -1  0,333+0,413i
1 -1  3,832+0,208i
1 -1  7,016+0,204i
1 -1  10,137+0,203i
1 -1  13,326+0,204i
2  0  0,429-1,281i
2  0  -1,317-0,836i
2  0  -5,138-0,372i
2  0  -8,418-0,356i
2  0  -11,620-0,351i
2 -1  -0,386+1,101i
2 -1  1,146+0,652i
2 -1  5,136+0,218i
2 -1  8,417+0,208i
2 -1  11,620+0,206i
)";

inline const std::vector<TableZero>& published_zero_table() {
    static const std::vector<TableZero> table = [] {
        std::istringstream in(kZeroTableText);
        return parse_zero_table(in);
    }();
    return table;
}

/// Zero of H^(kind)_nu on the lifted point; kind 2 is reached through
/// conjugation on the surface.
inline cplx hankel_on_surface(int kind, int nu, const RiemannPoint& z) { return hankel(kind, nu, z); }

struct NewtonOptions {
    int max_steps = 50;
    double residual_target = 1e-12;
    double damping = 0.5;
};

/**
 * @brief Newton iteration on the sheet. The argument is tracked
 *        continuously; leaving the sheet raises SheetDrift. A step that
 *        increases |H| is repeatedly shortened by the damping factor.
 */
inline Resonance refine_zero(int nu, int kind, int sheet, cplx seed, const NewtonOptions& opt = {}) {
    if (nu != 1 && nu != 2) throw InvalidArgument("refine_zero: nu must be 1 or 2");
    if (kind != 1 && kind != 2) throw InvalidArgument("refine_zero: kind must be 1 or 2");
    if (seed == cplx(0.0)) throw InvalidArgument("refine_zero: seed must be non-zero");
    RiemannPoint z = RiemannPoint::on_sheet(seed, sheet);
    cplx h = hankel(kind, nu, z);
    if (!(std::abs(h) < 0.5)) throw PreconditionError("refine_zero: seed outside the basin (|H| >= 0.5)");
    for (int step = 0; step < opt.max_steps; ++step) {
        if (std::abs(h) < opt.residual_target) break;
        const cplx d = hankel_derivative(kind, nu, z);
        cplx delta = -h / d;
        bool improved = false;
        for (int cut = 0; cut < 40; ++cut) {
            const cplx p = z.principal_value();
            const cplx q = p + delta;
            if (q == cplx(0.0)) {
                delta *= opt.damping;
                continue;
            }
            const RiemannPoint trial(std::abs(q), z.argument() + std::arg(q / p));
            if (trial.sheet_index() != sheet) throw SheetDrift("refine_zero: iterate left the sheet");
            const cplx ht = hankel(kind, nu, trial);
            if (std::abs(ht) < std::abs(h)) {
                z = trial;
                h = ht;
                improved = true;
                break;
            }
            delta *= opt.damping;
        }
        if (!improved) break;  // at the rounding floor
    }
    Resonance r;
    r.nu = nu;
    r.kind = kind;
    r.sheet = sheet;
    r.position = z.principal_value();
    r.residual = std::abs(h);
    if (!(r.residual < 1e-10)) throw NonConvergence("refine_zero: no convergence within the step budget");
    return r;
}

/// Projection-plane rectangle [re_min, re_max] x [im_min, im_max].
struct Rectangle {
    double re_min, re_max, im_min, im_max;

    void validate() const {
        if (!(re_max > re_min) || !(im_max > im_min)) throw InvalidArgument("Rectangle: empty rectangle");
        // lifting is continuous only if the rectangle avoids the cut
        if (re_min <= 0.0 && im_min <= 0.0 && im_max >= 0.0)
            throw InvalidArgument("Rectangle: must not meet the negative real axis or the origin");
    }
};

namespace detail {

/// Winding of H along the segment a -> b (lifted to `sheet`). Pieces start
/// no longer than 0.05 and are bisected until every phase increment is
/// below pi/4, which rules out aliasing of a full turn.
inline double segment_winding(int nu, int kind, int sheet, cplx a, cplx b, double near_zero) {
    auto eval = [&](cplx p) {
        const RiemannPoint z = RiemannPoint::on_sheet(p, sheet);
        const cplx h = hankel(kind, nu, z);
        const cplx d = hankel_derivative(kind, nu, z);
        if (std::abs(h) < near_zero * std::abs(d)) throw DomainViolation("count: zero near the contour");
        return h;
    };
    struct Piece {
        cplx a, b, ha, hb;
        int depth;
    };
    double total = 0.0;
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / 0.05)));
    std::vector<Piece> stack;
    cplx prev = a, hprev = eval(a);
    for (int k = 1; k <= pieces; ++k) {
        const cplx next = a + (b - a) * (double(k) / pieces);
        const cplx hn = eval(next);
        stack.push_back({prev, next, hprev, hn, 0});
        prev = next;
        hprev = hn;
    }
    while (!stack.empty()) {
        Piece s = stack.back();
        stack.pop_back();
        const double inc = std::arg(s.hb / s.ha);
        if (std::abs(inc) < 0.25 * kPi) {
            total += inc;
            continue;
        }
        if (s.depth > 40) throw NonConvergence("count: contour sampling did not resolve the phase");
        const cplx m = 0.5 * (s.a + s.b);
        const cplx hm = eval(m);
        stack.push_back({m, s.b, hm, s.hb, s.depth + 1});
        stack.push_back({s.a, m, s.ha, hm, s.depth + 1});
    }
    return total;
}

}  // namespace detail

/// Number of zeros of H^(kind)_nu inside the rectangle lifted to `sheet`,
/// by the argument principle. A rectangle passing within 1e-3 of a zero is
/// enlarged slightly, up to three times.
inline int count_zeros_rectangle(int nu, int kind, int sheet, Rectangle rect) {
    rect.validate();
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            const cplx c[4] = {{rect.re_min, rect.im_min}, {rect.re_max, rect.im_min}, {rect.re_max, rect.im_max},
                               {rect.re_min, rect.im_max}};
            double w = 0.0;
            for (int k = 0; k < 4; ++k) w += detail::segment_winding(nu, kind, sheet, c[k], c[(k + 1) % 4], 1e-3);
            return static_cast<int>(std::lround(w / (2.0 * kPi)));
        } catch (const DomainViolation&) {
            const double jitter = 1.37e-2 * (attempt + 1);
            rect.re_min -= jitter;
            rect.re_max += jitter;
            rect.im_min -= jitter * 0.5;
            rect.im_max += jitter * 0.5;
            rect.validate();
        }
    }
    throw DomainViolation("count_zeros_rectangle: zero near the contour after 3 jitters");
}

/// Seeds for the zeros of H^(1)_nu on sheet 0 or -1: the string zeros
/// near the real axis (real part from the McMahon expansion
/// beta - (4 nu^2 - 1)/(8 beta), beta = (n + nu/2 - 1/4) pi) and the
/// eye-domain zeros (|Re| < nu) from the table.
inline std::vector<cplx> kind1_seeds(int nu, int sheet, int n_max) {
    std::vector<cplx> seeds;
    for (const TableZero& t : published_zero_table())
        if (t.nu == nu && t.sheet == sheet && std::abs(t.value.real()) < nu) seeds.push_back(t.value);
    for (int n = 1; n <= n_max; ++n) {
        const double beta = (n + 0.5 * nu - 0.25) * kPi;
        const double x = beta - (4.0 * nu * nu - 1.0) / (8.0 * beta);
        seeds.push_back(sheet == 0 ? cplx(-x, -0.35) : cplx(x, 0.2));
    }
    return seeds;
}

/// Rectangle (kind 1) holding the swept zeros.
inline Rectangle sweep_rectangle(int nu, int sheet, int n_max) {
    const double x = (n_max + 0.5 * nu - 0.25) * kPi + 0.5 * kPi;
    if (sheet == 0) return {-x, x, -2.0, -0.01};
    return {-x, x, 0.01, 2.0};
}

/**
 * @brief All zeros of H^(kind)_nu on sheet 0 or -1 (kind 1) or their
 *        mirror sheets 0 or +1 (kind 2) from the seeds, checked against the
 *        argument-principle count of the enclosing rectangle.
 */
inline std::vector<Resonance> seed_sweep(int nu, int kind, int sheet, int n_max) {
    if (n_max < 1 || n_max > 12) throw InvalidArgument("seed_sweep: n_max must lie in 1..12");
    const int base_sheet = (kind == 1) ? sheet : -sheet;
    if (base_sheet != 0 && base_sheet != -1) throw UnsupportedSheet("seed_sweep: sheet outside the swept range");
    std::vector<Resonance> out;
    for (cplx s : kind1_seeds(nu, base_sheet, n_max)) {
        Resonance r = refine_zero(nu, 1, base_sheet, s);
        if (kind == 2) {
            r.kind = 2;
            r.sheet = sheet;
            r.position = std::conj(r.position);
            r.residual = std::abs(hankel(2, nu, r.point()));
        }
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Resonance& o) {
            return std::abs(o.position - r.position) < 1e-8;
        });
        if (!duplicate) out.push_back(r);
    }
    Rectangle rect = sweep_rectangle(nu, base_sheet, n_max);
    if (kind == 2) rect = {rect.re_min, rect.re_max, -rect.im_max, -rect.im_min};
    const int counted = count_zeros_rectangle(nu, kind, sheet, rect);
    if (counted != static_cast<int>(out.size())) {
        std::ostringstream msg;
        msg << "seed_sweep: missed zero, rectangle [" << rect.re_min << ", " << rect.re_max << "] x [" << rect.im_min
            << ", " << rect.im_max << "] holds " << counted << " zeros but " << out.size() << " were refined";
        throw ConsistencyError(msg.str());
    }
    std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
        return std::abs(a.position) < std::abs(b.position);
    });
    return out;
}

/// e^{i pi} conj(z): the reflected zero, generally on another sheet.
inline RiemannPoint mirror_zero(const RiemannPoint& z) { return z.conj().rotated(kPi); }

/// Points alpha z* of the resonance ray through a zero, alpha >= 1.
inline std::vector<RiemannPoint> resonance_lattice(const Resonance& base, const std::vector<double>& alphas) {
    if (!(base.residual < 1e-10)) throw PreconditionError("resonance_lattice: base zero is not refined");
    std::vector<RiemannPoint> out;
    for (double a : alphas) {
        if (!(a >= 1.0)) throw InvalidArgument("resonance_lattice: alpha must be at least 1");
        out.push_back(base.point().scaled(a));
    }
    return out;
}

/// Base point of the second family: z* with H^(2)_nu(-z*) = 0, built from
/// a kind-1 zero w as -conj(w) = e^{i pi} conj(w) on the surface.
inline RiemannPoint second_family_base(const Resonance& kind1_zero) {
    if (kind1_zero.kind != 1) throw InvalidArgument("second_family_base: needs a zero of H^(1)");
    return mirror_zero(kind1_zero.point());
}

}  // namespace volcano
