#pragma once

// Piecewise-constant test signals: analytic indicator functions of
// half-planes, disks and local graph regions (and their complements), plus
// nearest-pixel raster images. Besides point membership every signal can
// report its exact piecewise-constant restriction to an axis-parallel line,
// which is what the semi-analytic quadrature consumes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace bendlab {

/// The whole plane (the constant-one signal).
struct Plane {};

/// For iota = +1: {x : x1 - p1 <= s'(x2 - p2)}; for iota = -1 the roles of
/// the coordinates are exchanged: {x : x2 - p2 <= s'(x1 - p1)}.
struct HalfPlane {
    double slope = 0.0;
    Point p;
    int iota = 1;
};

struct Disk {
    Point center;
    double radius = 1.0;
};

/// For iota = +1: {x : x1 <= g(x2)} with
/// g(v) = p1 + s'(v - p2) + b'(v - p2)^2 + sum_k H[k] (v - p2)^(k+3);
/// iota = -1 exchanges the coordinates.
struct GraphRegion {
    Point p;
    double slope = 0.0;
    double bend = 0.0;
    std::vector<double> higher;
    int iota = 1;
};

struct Region;

struct Complement {
    std::shared_ptr<const Region> inner;
};

struct Region {
    std::variant<Plane, HalfPlane, Disk, GraphRegion, Complement> shape;
};

inline Region make_complement(Region inner) {
    return Region{Complement{std::make_shared<const Region>(std::move(inner))}};
}

inline void validate(const Region& r) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) {
                if (!(s.radius > 0.0)) throw DomainError("disk radius must be positive");
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                if (s.iota != 1 && s.iota != -1) throw DomainError("half-plane orientation must be +1 or -1");
            } else if constexpr (std::is_same_v<T, GraphRegion>) {
                if (s.iota != 1 && s.iota != -1) throw DomainError("graph orientation must be +1 or -1");
            } else if constexpr (std::is_same_v<T, Complement>) {
                if (!s.inner) throw DomainError("complement without inner region");
                validate(*s.inner);
            }
        },
        r.shape);
}

enum class Axis { x1, x2 };

inline Axis other(Axis a) { return a == Axis::x1 ? Axis::x2 : Axis::x1; }

/// A maximal run of constant value along a line: the signal equals `value`
/// for line coordinates in [lo, hi).
struct Piece {
    double lo;
    double hi;
    double value;
};

namespace detail {

using Intervals = std::vector<std::pair<double, double>>;

inline double graph_value(const GraphRegion& g, double d) {
    double acc = 0.0;
    for (auto it = g.higher.rbegin(); it != g.higher.rend(); ++it) acc = (acc + *it) * d;
    return g.slope * d + g.bend * d * d + acc * d * d * d;
}

inline double graph_derivative(const GraphRegion& g, double d, int order) {
    // derivative of the polynomial part of g at d (order 1 or 2).
    double v = 0.0;
    if (order == 1) {
        v = g.slope + 2.0 * g.bend * d;
        for (std::size_t k = 0; k < g.higher.size(); ++k) {
            const double e = static_cast<double>(k + 3);
            v += g.higher[k] * e * std::pow(d, e - 1.0);
        }
    } else {
        v = 2.0 * g.bend;
        for (std::size_t k = 0; k < g.higher.size(); ++k) {
            const double e = static_cast<double>(k + 3);
            v += g.higher[k] * e * (e - 1.0) * std::pow(d, e - 2.0);
        }
    }
    return v;
}

/// Sorted roots of c[0] + c[1] d + ... within [lo, hi].
inline std::vector<double> poly_roots_in(const std::vector<double>& c, double lo, double hi) {
    std::vector<double> roots;
    std::size_t deg = c.size();
    while (deg > 0 && c[deg - 1] == 0.0) --deg;
    auto eval = [&](double d) {
        double acc = 0.0;
        for (std::size_t k = deg; k-- > 0;) acc = acc * d + c[k];
        return acc;
    };
    if (deg <= 1) return roots;
    if (deg == 2) {
        const double r = -c[0] / c[1];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    if (deg == 3) {
        const double A = c[2], B = c[1], C = c[0];
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) return roots;
        const double sq = std::sqrt(disc);
        const double qv = -0.5 * (B + std::copysign(sq, B));
        const double r1 = qv / A;
        const double r2 = qv != 0.0 ? C / qv : r1;
        for (double r : {std::min(r1, r2), std::max(r1, r2)})
            if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    constexpr int kSamples = 1024;
    double prev = lo, fprev = eval(lo);
    for (int i = 1; i <= kSamples; ++i) {
        const double d = lo + (hi - lo) * i / kSamples;
        const double f = eval(d);
        if (fprev == 0.0) roots.push_back(prev);
        else if ((fprev < 0.0) != (f < 0.0) && f != 0.0) {
            double a = prev, b = d, fa = fprev;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = eval(m);
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = d;
        fprev = f;
    }
    if (fprev == 0.0) roots.push_back(hi);
    return roots;
}

inline void push_interval(Intervals& out, double a, double b, double lo, double hi) {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (b > a) out.emplace_back(a, b);
}

inline Intervals complement_of(const Intervals& in, double lo, double hi) {
    Intervals out;
    double cur = lo;
    for (const auto& [a, b] : in) {
        if (a > cur) out.emplace_back(cur, a);
        cur = std::max(cur, b);
    }
    if (hi > cur) out.emplace_back(cur, hi);
    return out;
}

/// Membership intervals of a linear condition u <= pu + s (v - pv), where u
/// is the primary coordinate, along a line over [lo, hi].
inline void linear_intervals(double s, double pu, double pv, bool along_primary, double fixed, double lo,
                             double hi, Intervals& out) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (along_primary) {
        push_interval(out, -inf, pu + s * (fixed - pv), lo, hi);
    } else {
        const double need = fixed - pu;  // s (v - pv) >= need
        if (s > 0.0) push_interval(out, pv + need / s, inf, lo, hi);
        else if (s < 0.0) push_interval(out, -inf, pv + need / s, lo, hi);
        else if (need <= 0.0) push_interval(out, -inf, inf, lo, hi);
    }
}

inline void graph_intervals(const GraphRegion& g, double pu, double pv, bool along_primary, double fixed,
                            double lo, double hi, Intervals& out) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (along_primary) {
        push_interval(out, -inf, pu + graph_value(g, fixed - pv), lo, hi);
        return;
    }
    // {v : pu + graph(v - pv) >= fixed}
    std::vector<double> c{pu - fixed, g.slope, g.bend};
    c.insert(c.end(), g.higher.begin(), g.higher.end());
    const double dlo = lo - pv, dhi = hi - pv;
    std::vector<double> cuts{dlo};
    for (double r : poly_roots_in(c, dlo, dhi)) cuts.push_back(r);
    cuts.push_back(dhi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double m = 0.5 * (cuts[i] + cuts[i + 1]);
        if (pu + graph_value(g, m) < fixed) continue;
        const double a = std::max(cuts[i] + pv, lo), b = std::min(cuts[i + 1] + pv, hi);
        if (!(b > a)) continue;
        if (!out.empty() && a <= out.back().second) out.back().second = std::max(out.back().second, b);
        else out.emplace_back(a, b);
    }
}

/// Sorted disjoint intervals of [lo, hi] inside the region along a line (replaces `out`).
inline void region_intervals(const Region& r, Axis axis, double fixed, double lo, double hi, Intervals& out) {
    out.clear();
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            constexpr double inf = std::numeric_limits<double>::infinity();
            if constexpr (std::is_same_v<T, Plane>) {
                push_interval(out, -inf, inf, lo, hi);
            } else if constexpr (std::is_same_v<T, Disk>) {
                const double dc = fixed - (axis == Axis::x1 ? s.center.x2 : s.center.x1);
                const double q = s.radius * s.radius - dc * dc;
                if (q >= 0.0) {
                    const double w = std::sqrt(q);
                    const double c = axis == Axis::x1 ? s.center.x1 : s.center.x2;
                    push_interval(out, c - w, c + w, lo, hi);
                }
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                const bool primary_is_x1 = s.iota == 1;
                const double pu = primary_is_x1 ? s.p.x1 : s.p.x2;
                const double pv = primary_is_x1 ? s.p.x2 : s.p.x1;
                linear_intervals(s.slope, pu, pv, (axis == Axis::x1) == primary_is_x1, fixed, lo, hi, out);
            } else if constexpr (std::is_same_v<T, GraphRegion>) {
                const bool primary_is_x1 = s.iota == 1;
                const double pu = primary_is_x1 ? s.p.x1 : s.p.x2;
                const double pv = primary_is_x1 ? s.p.x2 : s.p.x1;
                graph_intervals(s, pu, pv, (axis == Axis::x1) == primary_is_x1, fixed, lo, hi, out);
            } else {
                Intervals inner;
                region_intervals(*s.inner, axis, fixed, lo, hi, inner);
                out = complement_of(inner, lo, hi);
            }
        },
        r.shape);
}

/// Signed defining function: <= 0 inside; |value| small near the boundary.
inline double defining_function(const Region& r, Point x) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Plane>) {
                return -1.0;
            } else if constexpr (std::is_same_v<T, Disk>) {
                // (|x-c|^2 - r^2) / 2r: distance to the circle to first order, no sqrt
                const double d1 = x.x1 - s.center.x1, d2 = x.x2 - s.center.x2;
                return (d1 * d1 + d2 * d2 - s.radius * s.radius) / (2.0 * s.radius);
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                if (s.iota == 1) return (x.x1 - s.p.x1) - s.slope * (x.x2 - s.p.x2);
                return (x.x2 - s.p.x2) - s.slope * (x.x1 - s.p.x1);
            } else if constexpr (std::is_same_v<T, GraphRegion>) {
                if (s.iota == 1) return x.x1 - s.p.x1 - graph_value(s, x.x2 - s.p.x2);
                return x.x2 - s.p.x2 - graph_value(s, x.x1 - s.p.x1);
            } else {
                return -defining_function(*s.inner, x);
            }
        },
        r.shape);
}

}  // namespace detail

inline bool contains(const Region& r, Point x) { return detail::defining_function(r, x) <= 0.0; }

/// Nearest-pixel raster on a domain rectangle. Row 0 is the top row
/// (largest x2), column 0 the leftmost (smallest x1).
class RasterSignal {
public:
    RasterSignal(int width, int height, std::vector<double> pixels, Box domain = {{-1.0, -1.0}, {1.0, 1.0}})
        : w_(width), h_(height), px_(std::move(pixels)), dom_(domain) {
        if (w_ < 1 || h_ < 1) throw DomainError("raster dimensions must be positive");
        if (px_.size() != static_cast<std::size_t>(w_) * static_cast<std::size_t>(h_))
            throw DomainError("raster pixel count does not match width*height");
        if (!(dom_.width() > 0.0) || !(dom_.height() > 0.0)) throw DomainError("raster domain is degenerate");
    }

    int width() const { return w_; }
    int height() const { return h_; }
    const Box& domain() const { return dom_; }
    const std::vector<double>& pixels() const { return px_; }
    double pixel_width() const { return dom_.width() / w_; }
    double pixel_height() const { return dom_.height() / h_; }
    double at(int col, int row) const { return px_[static_cast<std::size_t>(row) * w_ + col]; }

    Point pixel_center(int col, int row) const {
        return {dom_.lo.x1 + (col + 0.5) * pixel_width(), dom_.hi.x2 - (row + 0.5) * pixel_height()};
    }

    double value(Point x) const {
        if (!dom_.contains(x)) return 0.0;
        const int col = std::clamp(static_cast<int>(std::floor((x.x1 - dom_.lo.x1) / pixel_width())), 0, w_ - 1);
        const int row = std::clamp(static_cast<int>(std::floor((dom_.hi.x2 - x.x2) / pixel_height())), 0, h_ - 1);
        return at(col, row);
    }

    void line_pieces(Axis axis, double fixed, double lo, double hi, std::vector<Piece>& out) const {
        out.clear();
        if (!(hi > lo)) return;
        auto add = [&](double a, double b, double v) {
            a = std::max(a, lo);
            b = std::min(b, hi);
            if (!(b > a)) return;
            if (!out.empty() && out.back().value == v && out.back().hi == a) out.back().hi = b;
            else out.push_back({a, b, v});
        };
        constexpr double inf = std::numeric_limits<double>::infinity();
        const bool horizontal = axis == Axis::x1;
        const double flo = horizontal ? dom_.lo.x2 : dom_.lo.x1;
        const double fhi = horizontal ? dom_.hi.x2 : dom_.hi.x1;
        const double dlo = horizontal ? dom_.lo.x1 : dom_.lo.x2;
        const double dhi = horizontal ? dom_.hi.x1 : dom_.hi.x2;
        if (fixed < flo || fixed > fhi) {
            add(lo, hi, 0.0);
            return;
        }
        add(-inf, dlo, 0.0);
        if (horizontal) {
            const int row = std::clamp(static_cast<int>(std::floor((dom_.hi.x2 - fixed) / pixel_height())), 0, h_ - 1);
            const double dx = pixel_width();
            const int c0 = std::clamp(static_cast<int>(std::floor((std::max(lo, dlo) - dlo) / dx)), 0, w_ - 1);
            const int c1 = std::clamp(static_cast<int>(std::floor((std::min(hi, dhi) - dlo) / dx)), 0, w_ - 1);
            for (int c = c0; c <= c1; ++c) add(dlo + c * dx, c + 1 == w_ ? dhi : dlo + (c + 1) * dx, at(c, row));
        } else {
            const int col = std::clamp(static_cast<int>(std::floor((fixed - dom_.lo.x1) / pixel_width())), 0, w_ - 1);
            const double dy = pixel_height();
            // increasing x2 runs from the bottom row upwards
            const int r0 = std::clamp(static_cast<int>(std::floor((dhi - std::max(lo, dlo)) / dy)), 0, h_ - 1);
            const int r1 = std::clamp(static_cast<int>(std::floor((dhi - std::min(hi, dhi)) / dy)), 0, h_ - 1);
            for (int r = r0; r >= r1; --r) {
                const double a = r + 1 == h_ ? dlo : dhi - (r + 1) * dy;
                add(a, dhi - r * dy, at(col, r));
            }
        }
        add(dhi, inf, 0.0);
    }

private:
    int w_;
    int h_;
    std::vector<double> px_;
    Box dom_;
};

/// cone_swap applied to a region: the region {swap(x) : x in r}.
inline Region swap_region(const Region& r) {
    return std::visit(
        [](const auto& s) -> Region {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Plane>) {
                return Region{s};
            } else if constexpr (std::is_same_v<T, Disk>) {
                return Region{Disk{cone_swap(s.center), s.radius}};
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                return Region{HalfPlane{s.slope, cone_swap(s.p), -s.iota}};
            } else if constexpr (std::is_same_v<T, GraphRegion>) {
                GraphRegion g = s;
                g.p = cone_swap(s.p);
                g.iota = -s.iota;
                return Region{std::move(g)};
            } else {
                return make_complement(swap_region(*s.inner));
            }
        },
        r.shape);
}

/// A piecewise-constant image: an analytic indicator (value 1 inside) or a
/// raster, times a positive gain.
class Signal {
public:
    Signal(Region r) : src_(std::move(r)) { validate(std::get<Region>(src_)); }
    Signal(RasterSignal r) : src_(std::make_shared<const RasterSignal>(std::move(r))) {}

    bool is_analytic() const { return std::holds_alternative<Region>(src_); }
    const Region& region() const {
        if (!is_analytic()) throw DomainError("signal is not analytic");
        return std::get<Region>(src_);
    }
    const RasterSignal* raster() const {
        return is_analytic() ? nullptr : std::get<std::shared_ptr<const RasterSignal>>(src_).get();
    }
    double gain() const { return gain_; }
    bool is_swapped() const { return swapped_; }

    Signal scaled(double c) const {
        Signal out = *this;
        out.gain_ *= c;
        return out;
    }

    /// The signal x -> f(swap(x)).
    Signal swapped() const {
        Signal out = *this;
        out.swapped_ = !swapped_;
        return out;
    }

    /// Raster domain in this signal's coordinates (nullopt for analytic signals).
    std::optional<Box> domain() const {
        const RasterSignal* r = raster();
        if (!r) return std::nullopt;
        Box d = r->domain();
        if (swapped_) d = {cone_swap(d.lo), cone_swap(d.hi)};
        return d;
    }

    /// Pixel extent along each axis in this signal's coordinates.
    std::optional<Point> pixel_size() const {
        const RasterSignal* r = raster();
        if (!r) return std::nullopt;
        Point p{r->pixel_width(), r->pixel_height()};
        return swapped_ ? cone_swap(p) : p;
    }

    double value(Point x) const {
        const Point p = swapped_ ? cone_swap(x) : x;
        if (const auto* reg = std::get_if<Region>(&src_)) return contains(*reg, p) ? gain_ : 0.0;
        return gain_ * std::get<std::shared_ptr<const RasterSignal>>(src_)->value(p);
    }

    /// Restriction to the line {x_axis in [lo, hi], other coordinate = fixed}
    /// as consecutive constant pieces covering [lo, hi].
    void line_pieces(Axis axis, double fixed, double lo, double hi, std::vector<Piece>& out) const {
        const Axis base_axis = swapped_ ? other(axis) : axis;
        if (const auto* reg = std::get_if<Region>(&src_)) {
            out.clear();
            if (!(hi > lo)) return;
            thread_local detail::Intervals ins;
            detail::region_intervals(*reg, base_axis, fixed, lo, hi, ins);
            double cur = lo;
            for (const auto& [a, b] : ins) {
                if (a > cur) out.push_back({cur, a, 0.0});
                out.push_back({a, b, gain_});
                cur = b;
            }
            if (hi > cur) out.push_back({cur, hi, 0.0});
        } else {
            std::get<std::shared_ptr<const RasterSignal>>(src_)->line_pieces(base_axis, fixed, lo, hi, out);
            for (auto& p : out) p.value *= gain_;
        }
    }

private:
    std::variant<Region, std::shared_ptr<const RasterSignal>> src_;
    double gain_ = 1.0;
    bool swapped_ = false;
};

inline double membership(const Signal& sig, Point x) { return sig.value(x); }

/// Local graph type (s', b', iota') of a boundary point.
struct PointType {
    double s = 0.0;
    double b = 0.0;
    int iota = 1;
    /// |s'| = 1: on the common edge of both cones, typed in the +1 cone.
    bool cone_corner = false;
};

inline constexpr double kBoundaryTolerance = 1e-9;

namespace detail {

/// Type from first and second derivative (g', g'') of the graph x_u = g(x_v)
/// in cone iota; retyped into the other cone when |g'| > 1.
inline PointType normalized_type(double g1, double g2, int iota) {
    PointType t{g1, 0.5 * g2, iota, false};
    auto flip = [&]() {
        const double s = t.s;
        t = {1.0 / s, -t.b / (s * s * s), -t.iota, false};
    };
    if (std::abs(t.s) > 1.0 + 1e-12) flip();
    if (std::abs(std::abs(t.s) - 1.0) <= 1e-12) {
        if (t.iota == -1) flip();
        t.cone_corner = true;
    }
    return t;
}

inline PointType boundary_type_of(const Region& r, Point p) {
    return std::visit(
        [&](const auto& s) -> PointType {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Plane>) {
                throw DomainError("the whole plane has no boundary");
            } else if constexpr (std::is_same_v<T, Disk>) {
                const double c = (p.x1 - s.center.x1) / s.radius;
                const double sn = (p.x2 - s.center.x2) / s.radius;
                if (std::abs(c) >= std::abs(sn)) return normalized_type(-sn / c, -1.0 / (s.radius * c * c * c), 1);
                return normalized_type(-c / sn, -1.0 / (s.radius * sn * sn * sn), -1);
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                return normalized_type(s.slope, 0.0, s.iota);
            } else if constexpr (std::is_same_v<T, GraphRegion>) {
                const double d = s.iota == 1 ? p.x2 - s.p.x2 : p.x1 - s.p.x1;
                return normalized_type(graph_derivative(s, d, 1), graph_derivative(s, d, 2), s.iota);
            } else {
                return boundary_type_of(*s.inner, p);
            }
        },
        r.shape);
}

}  // namespace detail

/// Type of the boundary point p of an analytic signal.
inline PointType boundary_type(const Signal& sig, Point p) {
    if (!sig.is_analytic()) throw DomainError("boundary typing needs an analytic signal");
    const Point q = sig.is_swapped() ? cone_swap(p) : p;
    const double f = detail::defining_function(sig.region(), q);
    if (!(std::abs(f) <= kBoundaryTolerance))
        throw DomainError("point is not on the region boundary (defining function " + std::to_string(f) + ")");
    PointType t = detail::boundary_type_of(sig.region(), q);
    if (sig.is_swapped()) {
        // swapping coordinates moves the same graph into the other cone
        t.iota = -t.iota;
        if (t.cone_corner && t.iota == -1) t = detail::normalized_type(t.s, 2.0 * t.b, t.iota);
    }
    return t;
}

/// n x n raster of the signal over `domain`, each pixel the membership at its
/// center, or the mean over a supersample x supersample sub-grid.
inline RasterSignal rasterize(const Signal& sig, int n, Box domain = {{-1.0, -1.0}, {1.0, 1.0}},
                              int supersample = 1) {
    if (n < 2) throw DomainError("raster resolution must be at least 2");
    if (supersample < 1) throw DomainError("supersampling factor must be positive");
    std::vector<double> px(static_cast<std::size_t>(n) * n);
    const double dx = domain.width() / n, dy = domain.height() / n;
    const double inv = 1.0 / (static_cast<double>(supersample) * supersample);
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) {
            double acc = 0.0;
            for (int sy = 0; sy < supersample; ++sy)
                for (int sx = 0; sx < supersample; ++sx) {
                    const Point x{domain.lo.x1 + (col + (sx + 0.5) / supersample) * dx,
                                  domain.hi.x2 - (row + (sy + 0.5) / supersample) * dy};
                    acc += sig.value(x);
                }
            px[static_cast<std::size_t>(row) * n + col] = acc * inv;
        }
    return RasterSignal(n, n, std::move(px), domain);
}

}  // namespace bendlab
