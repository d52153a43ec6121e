#pragma once

// Coordinate operators of the higher-order shearlet action: alpha-scaling,
// l-th order shearing, the combined representation argument and the
// cone swap. Everything here is a pure function on small value types.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bendlab {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;

    friend constexpr Point operator+(Point p, Point q) { return {p.x1 + q.x1, p.x2 + q.x2}; }
    friend constexpr Point operator-(Point p, Point q) { return {p.x1 - q.x1, p.x2 - q.x2}; }
    friend constexpr bool operator==(Point, Point) = default;
};

/// Axis-aligned rectangle [lo.x1, hi.x1] x [lo.x2, hi.x2].
struct Box {
    Point lo;
    Point hi;

    constexpr bool contains(Point p) const {
        return p.x1 >= lo.x1 && p.x1 <= hi.x1 && p.x2 >= lo.x2 && p.x2 <= hi.x2;
    }
    constexpr Box inflated(double eps) const {
        return {{lo.x1 - eps, lo.x2 - eps}, {hi.x1 + eps, hi.x2 + eps}};
    }
    constexpr double width() const { return hi.x1 - lo.x1; }
    constexpr double height() const { return hi.x2 - lo.x2; }
};

/// Cone index iota of the cone-adapted system.
enum class Cone : int { horizontal = 1, vertical = -1 };

inline int iota_of(Cone c) { return static_cast<int>(c); }

inline Cone cone_from_iota(int iota) {
    if (iota == 1) return Cone::horizontal;
    if (iota == -1) return Cone::vertical;
    throw DomainError("cone index must be +1 or -1, got " + std::to_string(iota));
}

inline Cone opposite(Cone c) { return c == Cone::horizontal ? Cone::vertical : Cone::horizontal; }

/// diag(a, a^alpha).
class AlphaScale {
public:
    AlphaScale(double a, double alpha) : a_(a), alpha_(alpha) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw DomainError("scale a must be positive and finite");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw DomainError("alpha must lie in [0,1]");
        a_alpha_ = std::pow(a, alpha);
    }

    double a() const { return a_; }
    double alpha() const { return alpha_; }
    /// a^alpha, evaluated once with std::pow.
    double a_alpha() const { return a_alpha_; }
    double determinant() const { return a_ * a_alpha_; }

private:
    double a_;
    double alpha_;
    double a_alpha_;
};

inline constexpr std::size_t kDefaultMaxShearOrder = 4;

/// Coefficients r_1..r_l of the l-th order shear x1 -> x1 + sum_m r_m x2^m.
class ShearParams {
public:
    explicit ShearParams(std::vector<double> r, std::size_t max_order = kDefaultMaxShearOrder)
        : r_(std::move(r)) {
        if (r_.empty()) throw DomainError("shear order must be at least 1");
        if (r_.size() > max_order)
            throw DomainError("shear order " + std::to_string(r_.size()) +
                              " exceeds the configured maximum " + std::to_string(max_order));
    }

    std::size_t order() const { return r_.size(); }
    std::span<const double> coefficients() const { return r_; }

    ShearParams negated() const {
        std::vector<double> n(r_.size());
        std::transform(r_.begin(), r_.end(), n.begin(), [](double v) { return -v; });
        return ShearParams(std::move(n), r_.size());
    }

    /// sum_{m=1}^{l} r_m d^m (Horner).
    double offset(double d) const {
        double acc = 0.0;
        for (auto it = r_.rbegin(); it != r_.rend(); ++it) acc = (acc + *it) * d;
        return acc;
    }

private:
    std::vector<double> r_;
};

/// A point (a, r, t) of the l-th order alpha-shearlet parameter set.
struct HigherOrderParams {
    AlphaScale scale;
    ShearParams shear;
    Point t;
};

/// Cone-adapted bendlet parameters (l = 2, r = (s, b)).
struct BendletParams {
    double a;
    double s;
    double b;
    Point t;
    Cone cone = Cone::horizontal;

    void validate() const {
        if (!(a > 0.0 && a < 1.0)) throw DomainError("bendlet scale a must lie in (0,1)");
        if (!(s >= -1.0 && s <= 1.0)) throw DomainError("bendlet shear s must lie in [-1,1]");
        if (!std::isfinite(b)) throw DomainError("bending b must be finite");
    }

    HigherOrderParams to_higher_order(double alpha) const {
        validate();
        return {AlphaScale(a, alpha), ShearParams({s, b}), t};
    }
};

inline Point apply_alpha_scale(const AlphaScale& sc, Point x) {
    return {sc.a() * x.x1, sc.a_alpha() * x.x2};
}

inline Point apply_inverse_alpha_scale(const AlphaScale& sc, Point x) {
    return {x.x1 / sc.a(), x.x2 / sc.a_alpha()};
}

inline Point apply_shear(const ShearParams& sh, Point x) { return {x.x1 + sh.offset(x.x2), x.x2}; }

/// The second coordinate is untouched by shearing, so subtracting the same
/// offset inverts it exactly.
inline Point apply_inverse_shear(const ShearParams& sh, Point x) {
    return {x.x1 - sh.offset(x.x2), x.x2};
}

/// A_{a,alpha}^{-1} S_{-r}(x - t).
inline Point representation_arg(const HigherOrderParams& p, Point x) {
    return apply_inverse_alpha_scale(p.scale, apply_inverse_shear(p.shear, x - p.t));
}

constexpr Point cone_swap(Point x) { return {x.x2, x.x1}; }

/// Range of the shear offset polynomial over [lo, hi]: endpoints plus interior
/// critical points, located by bracketing the derivative on a fine sample.
inline std::pair<double, double> shear_offset_range(const ShearParams& sh, double lo, double hi) {
    double mn = std::min(sh.offset(lo), sh.offset(hi));
    double mx = std::max(sh.offset(lo), sh.offset(hi));
    const auto r = sh.coefficients();
    auto deriv = [&](double d) {
        double acc = 0.0;
        for (std::size_t m = r.size(); m >= 1; --m) acc = acc * d + static_cast<double>(m) * r[m - 1];
        return acc;
    };
    auto consider = [&](double d) {
        const double v = sh.offset(d);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    };
    if (r.size() == 2 && r[1] != 0.0) {
        const double d = -r[0] / (2.0 * r[1]);
        if (d > lo && d < hi) consider(d);
    } else if (r.size() > 2) {
        constexpr int kSamples = 256;
        double prev_d = lo;
        double prev_v = deriv(lo);
        for (int i = 1; i <= kSamples; ++i) {
            const double d = lo + (hi - lo) * i / kSamples;
            const double v = deriv(d);
            if ((prev_v <= 0.0) != (v <= 0.0)) {
                double a = prev_d, b = d, fa = prev_v;
                for (int it = 0; it < 80; ++it) {
                    const double m = 0.5 * (a + b);
                    const double fm = deriv(m);
                    if ((fa <= 0.0) == (fm <= 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                consider(a);
                consider(b);
            }
            prev_d = d;
            prev_v = v;
        }
    }
    return {mn, mx};
}

}  // namespace bendlab
