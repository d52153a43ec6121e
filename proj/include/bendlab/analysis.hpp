#pragma once

// Decay-rate fitting and point classification.
//
// A boundary point of type (s', b', iota') shows coefficients decaying like
//   a^{(1+alpha)/2}                     matched shear and bending,
//   a^{(2-alpha)/2}                     matched shear, wrong bending,
//   a^{(1-alpha)(M+1) + (1+alpha)/2}    wrong shear (or cone),
// and exactly zero once the atoms no longer meet the boundary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "generators.hpp"
#include "rational.hpp"
#include "signals.hpp"
#include "transform.hpp"

namespace bendlab {

struct RateFit {
    enum class Status { ok, all_floored };
    Status status = Status::ok;
    double slope = 0.0;
    /// log C of |c| ~ C a^slope.
    double intercept = 0.0;
    /// Root mean square residual of the log-log fit.
    double residual = 0.0;
    int points_used = 0;
    int floored_excluded = 0;
};

/// Least-squares line through (log a_j, log |c_j|) over the non-floored points.
inline RateFit fit_rate(const DecayCurve& c) {
    RateFit f;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.floored[i]) {
            ++f.floored_excluded;
            continue;
        }
        x.push_back(std::log(c.a[i]));
        y.push_back(std::log(c.magnitude[i]));
    }
    f.points_used = static_cast<int>(x.size());
    if (x.empty() && c.size() > 0) {
        f.status = RateFit::Status::all_floored;
        f.slope = std::numeric_limits<double>::infinity();
        return f;
    }
    if (x.size() < 2) throw FitError("rate fit needs at least two non-floored points, got " + std::to_string(x.size()));
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("rate fit needs at least two distinct scales");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

template <class T>
struct TheoreticalRates {
    T matched;
    T wrong_bending;
    T wrong_shear;
    // off-boundary coefficients vanish identically (infinite rate)
};

template <class T>
TheoreticalRates<T> theoretical_rates(T alpha, int M) {
    if (M < 1) throw DomainError("number of vanishing moments must be positive");
    const T one(1), two(2);
    return {(one + alpha) / two, (two - alpha) / two, (one - alpha) * T(M + 1) + (one + alpha) / two};
}

inline TheoreticalRates<double> theoretical_rates(double alpha, int M) { return theoretical_rates<double>(alpha, M); }

/// Curvature 2|b'| / (1 + s'^2)^{3/2} of a boundary point.
inline double curvature_of(const PointType& pt) {
    return 2.0 * std::abs(pt.b) / std::pow(1.0 + pt.s * pt.s, 1.5);
}

enum class CaseLabel { off_boundary, wrong_orientation, wrong_bending, matched };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::off_boundary: return "OFF_BOUNDARY";
        case CaseLabel::wrong_orientation: return "WRONG_ORIENTATION";
        case CaseLabel::wrong_bending: return "WRONG_BENDING";
        case CaseLabel::matched: return "MATCHED";
    }
    return "?";
}

inline CaseLabel parse_case(const std::string& s) {
    for (CaseLabel c : {CaseLabel::off_boundary, CaseLabel::wrong_orientation, CaseLabel::wrong_bending, CaseLabel::matched})
        if (s == to_string(c)) return c;
    throw ConfigError("unknown case label '" + s + "'");
}

/// Case whose theoretical rate is nearest to `slope` on the log scale; ties
/// go to the slower (smaller) rate.
inline CaseLabel nearest_case(double slope, const TheoreticalRates<double>& r) {
    const double ls = std::log(std::max(slope, 1e-12));
    const double d[3] = {std::abs(ls - std::log(r.matched)), std::abs(ls - std::log(r.wrong_bending)),
                         std::abs(ls - std::log(r.wrong_shear))};
    const CaseLabel lab[3] = {CaseLabel::matched, CaseLabel::wrong_bending, CaseLabel::wrong_orientation};
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i)
        if (d[i] < d[best]) best = i;
    return lab[best];
}

/// Evenly spaced grid lo, lo+step, ..., hi (values rounded to 1e-12).
inline std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw ConfigError("invalid grid specification");
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n + 1));
    for (long i = 0; i <= n; ++i) g.push_back(std::round((lo + i * step) * 1e12) / 1e12);
    return g;
}

struct ClassifyOptions {
    double alpha = 0.335;
    std::vector<Cone> cones{Cone::horizontal, Cone::vertical};
    std::vector<double> s_grid = make_grid(-1.0, 1.0, 0.05);
    std::vector<double> b_grid = make_grid(-5.0, 5.0, 0.1);
    int j_min = 4;
    int j_max = 8;
    QuadratureSpec quad{};
    bool refine = true;
    /// Refined grid: (2*refine_half + 1) points per axis at 1/refine_factor of the coarse step.
    int refine_factor = 5;
    /// After the grid stages, follow the magnitude maximum from j_min down to
    /// j_max by a local search inside the grid bounds.
    bool continuation = true;
    unsigned threads = 1;
};

struct ClassificationResult {
    CaseLabel label = CaseLabel::off_boundary;
    double s = 0.0;
    double b = 0.0;
    int iota = 1;
    /// Coarse-grid (s, b) before refinement.
    double s_coarse = 0.0;
    double b_coarse = 0.0;
    double rate = std::numeric_limits<double>::infinity();
    double residual = 0.0;
    bool has_geometry = false;
    Point normal{0.0, 0.0};
    double curvature = 0.0;
    /// In [0,1]: 1 for a perfect power law, decreasing with the fit residual.
    double confidence = 0.0;
    bool unresolved = false;
    std::vector<std::string> warnings;
};

namespace detail {

inline double grid_step(const std::vector<double>& g) {
    if (g.size() < 2) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < g.size(); ++i) m = std::min(m, std::abs(g[i + 1] - g[i]));
    return m;
}

inline std::vector<double> local_grid(double c, double step, int factor, double lo, double hi) {
    std::vector<double> g;
    if (!(step > 0.0)) return {c};
    for (int k = -factor; k <= factor; ++k) {
        const double v = std::round((c + k * step / factor) * 1e12) / 1e12;
        if (v >= lo - 1e-12 && v <= hi + 1e-12) g.push_back(v);
    }
    return g;
}

struct Candidate {
    const DecayCurve* curve = nullptr;
    double score = -1.0;
};

inline void consider(Candidate& best, const DecayCurve& c, std::size_t at) {
    const double v = c.floored[at] ? 0.0 : c.magnitude[at];
    if (v > best.score) best = {&c, v};
}

/// Compass search for the largest |coefficient| at each scale j_min..j_max in
/// turn, starting every scale from the optimum of the previous one.
inline std::pair<double, double> follow_maximum(const Signal& sig, const GeneratorPair& g, Point t, Cone cone,
                                                double s, double b, double ds, double db, double s_lo, double s_hi,
                                                double b_lo, double b_hi, const ClassifyOptions& opt) {
    for (int j = opt.j_min; j <= opt.j_max; ++j) {
        const double a = std::ldexp(1.0, -j);
        // the peak narrows like a^(1-alpha) in s and a^(1-2 alpha) in b
        const double coarser = std::ldexp(1.0, opt.j_max - j);
        const double tol_s = 1e-4 * std::pow(coarser, 1.0 - opt.alpha);
        const double tol_b = 1e-3 * std::pow(coarser, std::max(1.0 - 2.0 * opt.alpha, 0.0));
        auto value = [&](double ss, double bb) {
            return std::abs(coefficient(sig, g, BendletParams{a, ss, bb, t, cone}, opt.alpha, opt.quad));
        };
        double cur = value(s, b);
        double hs = s_hi > s_lo ? ds : 0.0, hb = b_hi > b_lo ? db : 0.0;
        while (hs >= tol_s || hb >= tol_b) {
            double bs = s, bb = b, bv = cur;
            const double cand[4][2] = {{s + hs, b}, {s - hs, b}, {s, b + hb}, {s, b - hb}};
            for (const auto& c : cand) {
                const double cs = std::clamp(c[0], s_lo, s_hi), cb = std::clamp(c[1], b_lo, b_hi);
                if (cs == s && cb == b) continue;
                const double v = value(cs, cb);
                if (v > bv) {
                    bs = cs;
                    bb = cb;
                    bv = v;
                }
            }
            if (bv > cur) {
                s = bs;
                b = bb;
                cur = bv;
            } else {
                hs = hs >= tol_s ? 0.5 * hs : 0.0;
                hb = hb >= tol_b ? 0.5 * hb : 0.0;
            }
        }
    }
    return {s, b};
}

}  // namespace detail

/// Decides which case of the decay theorem is observed at t.
inline ClassificationResult classify_point(const Signal& sig, const GeneratorPair& g, Point t,
                                           const ClassifyOptions& opt = {}) {
    if (opt.cones.empty() || opt.s_grid.empty() || opt.b_grid.empty())
        throw ConfigError("classification grids and cone list must be nonempty");
    if (opt.j_max < 5) throw ConfigError("classification needs j_max >= 5 to observe vanishing coefficients");
    ClassificationResult res;
    if (!(opt.alpha > 1.0 / 3.0 && opt.alpha < 0.5))
        res.warnings.push_back("alpha outside (1/3, 1/2): the matched lower bound is not guaranteed");
    if (!(opt.alpha < 0.5)) res.warnings.push_back("alpha >= 1/2 cannot separate matched from wrong bending");
    for (const auto& w : g.warnings()) res.warnings.push_back(w);
    const auto rates = theoretical_rates(opt.alpha, g.vanishing_moments());

    std::vector<std::vector<DecayCurve>> per_cone;
    for (Cone c : opt.cones)
        per_cone.push_back(sweep(sig, g, opt.alpha, t, c, opt.s_grid, opt.b_grid, opt.j_min, opt.j_max, opt.quad,
                                 opt.threads));

    bool all_zero = true;
    for (const auto& curves : per_cone)
        for (const auto& c : curves)
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c.j[i] > 4 && !c.floored[i]) all_zero = false;
    if (all_zero) {
        res.label = CaseLabel::off_boundary;
        res.confidence = 1.0;
        res.iota = iota_of(opt.cones.front());
        return res;
    }

    // The grid stages rank by the magnitude at j_max; when the maximum is
    // followed through the scales afterwards they rank at j_min instead.
    const std::size_t at = opt.continuation ? 0 : static_cast<std::size_t>(opt.j_max - opt.j_min);
    detail::Candidate best;
    for (const auto& curves : per_cone)
        for (const auto& c : curves) detail::consider(best, c, at);

    const double ds = detail::grid_step(opt.s_grid), db = detail::grid_step(opt.b_grid);
    std::vector<DecayCurve> refined;
    res.s_coarse = best.curve->s;
    res.b_coarse = best.curve->b;
    if (opt.refine && opt.refine_factor > 1) {
        const auto sg = detail::local_grid(best.curve->s, ds, opt.refine_factor, -1.0, 1.0);
        const auto bg = detail::local_grid(best.curve->b, db, opt.refine_factor, -std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity());
        refined = sweep(sig, g, opt.alpha, t, cone_from_iota(best.curve->iota), sg, bg, opt.j_min, opt.j_max, opt.quad,
                        opt.threads);
        for (const auto& c : refined) detail::consider(best, c, at);
    }

    DecayCurve followed;
    if (opt.continuation) {
        const auto [slo, shi] = std::minmax_element(opt.s_grid.begin(), opt.s_grid.end());
        const auto [blo, bhi] = std::minmax_element(opt.b_grid.begin(), opt.b_grid.end());
        const int f = opt.refine ? std::max(opt.refine_factor, 1) : 1;
        const Cone cone = cone_from_iota(best.curve->iota);
        const auto [s, b] = detail::follow_maximum(sig, g, t, cone, best.curve->s, best.curve->b, ds / f, db / f,
                                                   std::max(*slo, -1.0), std::min(*shi, 1.0), *blo, *bhi, opt);
        followed = decay_curve(sig, g, opt.alpha, s, b, t, cone, opt.j_min, opt.j_max, opt.quad);
        best.curve = &followed;
    }

    const DecayCurve& bc = *best.curve;
    res.s = bc.s;
    res.b = bc.b;
    res.iota = bc.iota;
    RateFit fit;
    try {
        fit = fit_rate(bc);
    } catch (const FitError& e) {
        res.label = CaseLabel::wrong_orientation;
        res.unresolved = true;
        res.warnings.push_back(std::string("rate fit failed: ") + e.what());
        return res;
    }
    res.rate = fit.slope;
    res.residual = fit.residual;
    res.label = nearest_case(fit.slope, rates);
    // Separation scale: half the log gap between the two slowest rates.
    const double gap = 0.5 * std::log(rates.wrong_bending / rates.matched);
    res.confidence = 1.0 / (1.0 + fit.residual / gap);
    const double mid_shear = std::sqrt(rates.wrong_bending * rates.wrong_shear);
    if (fit.slope > mid_shear) {
        // the best atom decays like a misaligned one although the point is on the boundary
        res.unresolved = true;
        res.warnings.push_back("no grid cell matches the boundary orientation");
    }
    if (res.label == CaseLabel::matched) {
        const PointType pt{res.s, res.b, res.iota, false};
        const double nrm = std::hypot(1.0, res.s);
        res.normal = res.iota == 1 ? Point{1.0 / nrm, -res.s / nrm} : Point{-res.s / nrm, 1.0 / nrm};
        res.curvature = curvature_of(pt);
        res.has_geometry = true;
    }
    return res;
}

}  // namespace bendlab
