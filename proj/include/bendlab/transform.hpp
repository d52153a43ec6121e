#pragma once

// Atoms a^{-(1+alpha)/2} psi(A^{-1} S_{-r}(x - t)) of the l-th order
// alpha-shearlet system and their inner products with piecewise-constant
// signals.
//
// Two quadratures are provided:
//  * grid:     midpoint rule on square cells of side min(a*u1, a^alpha*u2)/q,
//              u1/u2 being the native grid units of psi1/phi1, laid out along
//              the sheared atom rows;
//  * adaptive: for every row x2 = const the signal is an exact sequence of
//              constant pieces, so the inner integral is a sum of differences
//              of the exact primitive of psi1; the outer integral over the
//              window variable is globally adaptive Gauss-Kronrod.
// Vertical-cone atoms are evaluated as horizontal-cone atoms of the
// coordinate-swapped signal.

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "signals.hpp"

namespace bendlab {

inline constexpr double kCoefficientFloor = 1e-14;

struct QuadratureSpec {
    enum class Method { grid, adaptive };
    Method method = Method::adaptive;
    int q = 16;
    double tol = 1e-8;
    std::size_t max_panels = 2000;

    void validate() const {
        if (q < 4) throw ConfigError("grid oversampling q must be at least 4");
        if (!(tol > 0.0)) throw ConfigError("adaptive tolerance must be positive");
    }

    friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

inline const char* to_string(QuadratureSpec::Method m) {
    return m == QuadratureSpec::Method::grid ? "grid" : "adaptive";
}

inline QuadratureSpec::Method parse_method(const std::string& s) {
    if (s == "grid") return QuadratureSpec::Method::grid;
    if (s == "adaptive") return QuadratureSpec::Method::adaptive;
    throw ConfigError("unknown quadrature method '" + s + "'");
}

/// Side information of a coefficient evaluation.
struct Diagnostics {
    bool clipped = false;
    bool converged = true;
    std::size_t panels = 0;
    std::vector<std::string> warnings;
};

class Atom {
public:
    Atom(const GeneratorPair& g, HigherOrderParams p, Cone cone = Cone::horizontal)
        : g_(&g), p_(std::move(p)), cone_(cone), frame_(p_) {
        const double e = -0.5 * (1.0 + p_.scale.alpha());
        norm_ = std::pow(p_.scale.a(), e);
        if (cone_ == Cone::vertical) frame_.t = cone_swap(p_.t);
        const Box gb = g.support_box();
        const double a = p_.scale.a(), aa = p_.scale.a_alpha();
        const double dlo = aa * gb.lo.x2, dhi = aa * gb.hi.x2;
        const auto [omin, omax] = shear_offset_range(frame_.shear, dlo, dhi);
        frame_box_ = {{frame_.t.x1 + a * gb.lo.x1 + omin, frame_.t.x2 + dlo},
                      {frame_.t.x1 + a * gb.hi.x1 + omax, frame_.t.x2 + dhi}};
        box_ = cone_ == Cone::horizontal ? frame_box_ : Box{cone_swap(frame_box_.lo), cone_swap(frame_box_.hi)};
    }

    static Atom bendlet(const GeneratorPair& g, const BendletParams& bp, double alpha) {
        return Atom(g, bp.to_higher_order(alpha), bp.cone);
    }

    const GeneratorPair& generator() const { return *g_; }
    const HigherOrderParams& params() const { return p_; }
    Cone cone() const { return cone_; }
    /// a^{-(1+alpha)/2}.
    double normalization() const { return norm_; }
    /// Support of the atom in signal coordinates.
    const Box& support_box() const { return box_; }
    /// Parameters of the equivalent horizontal-cone atom acting on swapped coordinates.
    const HigherOrderParams& frame_params() const { return frame_; }
    const Box& frame_box() const { return frame_box_; }

    double operator()(Point x) const {
        const Point xf = cone_ == Cone::horizontal ? x : cone_swap(x);
        if (!frame_box_.contains(xf)) return 0.0;
        return norm_ * (*g_)(representation_arg(frame_, xf));
    }

private:
    const GeneratorPair* g_;
    HigherOrderParams p_;
    Cone cone_;
    HigherOrderParams frame_;
    double norm_;
    Box frame_box_;
    Box box_;
};

inline double atom_eval(const Atom& at, Point x) { return at(x); }

namespace detail {

inline double native_wavelet_unit(const GeneratorPair& g) {
    const int M = g.vanishing_moments();
    return (g.psi1().hi() - g.psi1().lo()) / (2.0 * M - 1.0);
}

inline void check_raster(const Signal& sig, const Atom& at, Diagnostics& diag) {
    const auto px = sig.pixel_size();
    if (!px) return;
    const Box gb = at.generator().support_box();
    const double width = at.params().scale.a() * gb.width();
    const double pixel = at.cone() == Cone::horizontal ? px->x1 : px->x2;
    if (pixel > width) {
        const int jmax = static_cast<int>(std::floor(std::log2(gb.width() / pixel)));
        throw ResolutionError("raster pixel size " + std::to_string(pixel) + " exceeds the atom width " +
                                  std::to_string(width) + "; finest feasible scale index is " + std::to_string(jmax),
                              jmax);
    }
    const Box dom = *sig.domain();
    const Box& b = at.support_box();
    if (b.lo.x1 < dom.lo.x1 || b.lo.x2 < dom.lo.x2 || b.hi.x1 > dom.hi.x1 || b.hi.x2 > dom.hi.x2) {
        diag.clipped = true;
        diag.warnings.push_back("atom support leaves the raster domain; integrating the clipped part");
    }
}

inline double coefficient_adaptive(const Signal& sig, const Atom& at, const QuadratureSpec& spec, Diagnostics& diag) {
    const GeneratorPair& g = at.generator();
    const HigherOrderParams& p = at.frame_params();
    const double a = p.scale.a(), aa = p.scale.a_alpha();
    const Wavelet1D& psi = g.psi1();
    const Window1D& phi = g.phi1();
    const double lo1 = psi.lo(), hi1 = psi.hi();
    std::vector<Piece> pieces;
    auto row = [&](double u2) {
        const double w = phi(u2);
        if (w == 0.0) return 0.0;
        const double d = aa * u2;
        const double base = p.t.x1 + p.shear.offset(d);
        sig.line_pieces(Axis::x1, p.t.x2 + d, base + a * lo1, base + a * hi1, pieces);
        if (pieces.size() < 2) return 0.0;
        const double vref = pieces.front().value;
        double acc = 0.0;
        double prev = 0.0;  // primitive at the left end of the current piece
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const double next = k + 1 == pieces.size() ? psi.primitive(hi1) : psi.primitive((pieces[k].hi - base) / a);
            const double dv = pieces[k].value - vref;
            if (dv != 0.0) acc += dv * (next - prev);
            prev = next;
        }
        return w * acc;
    };
    std::vector<double> knots;
    const auto wk = phi.knots();
    for (std::size_t i = 0; i + 1 < wk.size(); ++i)
        for (int s = 0; s < 4; ++s) knots.push_back(wk[i] + (wk[i + 1] - wk[i]) * s / 4.0);
    knots.push_back(wk.back());
    const double scale = std::pow(a, 0.5 * (1.0 + p.scale.alpha()));
    // Relative tolerance, or a tenth of the reporting floor for the coefficient.
    const auto r = integrate_adaptive(row, knots, spec.tol, 0.1 * kCoefficientFloor / scale, spec.max_panels);
    diag.panels = r.panels;
    diag.converged = r.converged;
    if (!r.converged) diag.warnings.push_back("adaptive quadrature stopped at the panel limit before reaching the tolerance");
    return scale * r.value;
}

inline double coefficient_grid(const Signal& sig, const Atom& at, const QuadratureSpec& spec, Diagnostics&) {
    const GeneratorPair& g = at.generator();
    const HigherOrderParams& p = at.frame_params();
    const double a = p.scale.a(), aa = p.scale.a_alpha();
    const Wavelet1D& psi = g.psi1();
    const Window1D& phi = g.phi1();
    const double h = std::min(a * native_wavelet_unit(g), aa * phi.scale()) / spec.q;
    // Cells are anchored so that the atom center y = 0 lies on a cell corner.
    const long i0 = static_cast<long>(std::floor(a * psi.lo() / h));
    const long i1 = static_cast<long>(std::ceil(a * psi.hi() / h));
    const long k0 = static_cast<long>(std::floor(aa * phi.lo() / h));
    const long k1 = static_cast<long>(std::ceil(aa * phi.hi() / h));
    std::vector<double> y1, wpsi;
    for (long i = i0; i < i1; ++i) {
        const double y = (static_cast<double>(i) + 0.5) * h;
        const double v = psi(y / a);
        if (v == 0.0) continue;
        y1.push_back(y);
        wpsi.push_back(v);
    }
    double total = 0.0;
    for (long k = k0; k < k1; ++k) {
        const double y2 = (static_cast<double>(k) + 0.5) * h;
        const double w = phi(y2 / aa);
        if (w == 0.0) continue;
        const double x2 = p.t.x2 + y2;
        const double base = p.t.x1 + p.shear.offset(y2);
        if (y1.empty()) continue;
        const double fref = sig.value({base + y1.front(), x2});
        double acc = 0.0;
        for (std::size_t i = 0; i < y1.size(); ++i) {
            const double dv = sig.value({base + y1[i], x2}) - fref;
            if (dv != 0.0) acc += dv * wpsi[i];
        }
        total += w * acc;
    }
    return at.normalization() * h * h * total;
}

}  // namespace detail

/// <f, psi_{a,r,t,iota}> for the atom `at`.
inline double coefficient(const Signal& sig, const Atom& at, const QuadratureSpec& spec = {},
                          Diagnostics* diag = nullptr) {
    spec.validate();
    Diagnostics local;
    Diagnostics& d = diag ? *diag : local;
    detail::check_raster(sig, at, d);
    const Signal frame_sig = at.cone() == Cone::horizontal ? sig : sig.swapped();
    if (spec.method == QuadratureSpec::Method::grid) return detail::coefficient_grid(frame_sig, at, spec, d);
    return detail::coefficient_adaptive(frame_sig, at, spec, d);
}

inline double coefficient(const Signal& sig, const GeneratorPair& g, const BendletParams& bp, double alpha,
                          const QuadratureSpec& spec = {}, Diagnostics* diag = nullptr) {
    return coefficient(sig, Atom::bendlet(g, bp, alpha), spec, diag);
}

/// Coefficient magnitudes over the dyadic ladder a_j = 2^-j.
struct DecayCurve {
    double s = 0.0;
    double b = 0.0;
    Point t;
    int iota = 1;
    double alpha = 0.335;
    GeneratorDescriptor generator;
    std::vector<int> j;
    std::vector<double> a;
    std::vector<double> coefficient;
    std::vector<double> magnitude;
    std::vector<bool> floored;

    std::size_t size() const { return j.size(); }
    bool all_floored() const { return std::all_of(floored.begin(), floored.end(), [](bool f) { return f; }); }
    bool any_floored() const { return std::any_of(floored.begin(), floored.end(), [](bool f) { return f; }); }
};

inline DecayCurve decay_curve(const Signal& sig, const GeneratorPair& g, double alpha, double s, double b, Point t,
                              Cone cone, int j_min, int j_max, const QuadratureSpec& spec = {}) {
    if (!(j_min < j_max)) throw DomainError("decay curve needs j_min < j_max");
    if (j_min < 1) throw DomainError("scale index must be at least 1 (a < 1)");
    DecayCurve c;
    c.s = s;
    c.b = b;
    c.t = t;
    c.iota = iota_of(cone);
    c.alpha = alpha;
    c.generator = g.descriptor();
    for (int j = j_min; j <= j_max; ++j) {
        const double a = std::ldexp(1.0, -j);
        const double v = coefficient(sig, g, BendletParams{a, s, b, t, cone}, alpha, spec);
        const bool fl = !(std::abs(v) >= kCoefficientFloor);
        c.j.push_back(j);
        c.a.push_back(a);
        c.coefficient.push_back(v);
        c.magnitude.push_back(fl ? kCoefficientFloor : std::abs(v));
        c.floored.push_back(fl);
    }
    return c;
}

/// One decay curve per (s, b) in s-major order. Cells are independent, so the
/// result does not depend on the number of threads.
inline std::vector<DecayCurve> sweep(const Signal& sig, const GeneratorPair& g, double alpha, Point t, Cone cone,
                                     const std::vector<double>& s_grid, const std::vector<double>& b_grid, int j_min,
                                     int j_max, const QuadratureSpec& spec = {}, unsigned threads = 1) {
    if (s_grid.empty() || b_grid.empty()) throw DomainError("sweep grids must be nonempty");
    std::vector<DecayCurve> out(s_grid.size() * b_grid.size());
    parallel_for(out.size(), threads, [&](std::size_t idx) {
        const double s = s_grid[idx / b_grid.size()];
        const double b = b_grid[idx % b_grid.size()];
        out[idx] = decay_curve(sig, g, alpha, s, b, t, cone, j_min, j_max, spec);
    });
    return out;
}

/// Largest |psi_{a,s,0,t}(Q_p x) - psi_{a,s+2 p t2, p, (t1 + p t2^2, t2)}(x)|
/// over random points around the atom support (alpha = 0 atoms).
inline double qp_shear_identity_check(const GeneratorPair& g, double p, double a, double s, Point t, int samples,
                                      unsigned long long seed = 1) {
    if (samples < 1) throw DomainError("need at least one sample point");
    const Atom left(g, HigherOrderParams{AlphaScale(a, 0.0), ShearParams({s, 0.0}), t});
    const Atom right(g, HigherOrderParams{AlphaScale(a, 0.0), ShearParams({s + 2.0 * p * t.x2, p}),
                                          {t.x1 + p * t.x2 * t.x2, t.x2}});
    const Box box = right.support_box().inflated(0.05 * (right.support_box().width() + right.support_box().height()));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u1(box.lo.x1, box.hi.x1), u2(box.lo.x2, box.hi.x2);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Point x{u1(rng), u2(rng)};
        const Point qx{x.x1 - p * x.x2 * x.x2, x.x2};
        worst = std::max(worst, std::abs(left(qx) - right(x)));
    }
    return worst;
}

/// L2 norm of an atom by the midpoint rule on its support box in signal
/// coordinates, on square cells of side min(a*u1, a^alpha*u2)/q.
inline double atom_l2_norm(const Atom& at, int q = 4) {
    const GeneratorPair& g = at.generator();
    const double a = at.params().scale.a(), aa = at.params().scale.a_alpha();
    const double h = std::min(a * detail::native_wavelet_unit(g), aa * g.phi1().scale()) / q;
    const Box& b = at.support_box();
    const long n1 = static_cast<long>(std::ceil(b.width() / h));
    const long n2 = static_cast<long>(std::ceil(b.height() / h));
    double acc = 0.0;
    for (long k = 0; k < n2; ++k) {
        const double x2 = b.lo.x2 + (k + 0.5) * h;
        double racc = 0.0;
        for (long i = 0; i < n1; ++i) {
            const double v = at({b.lo.x1 + (i + 0.5) * h, x2});
            racc += v * v;
        }
        acc += racc;
    }
    return std::sqrt(acc * h * h);
}

}  // namespace bendlab
