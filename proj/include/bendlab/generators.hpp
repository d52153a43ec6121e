#pragma once

// Separable compactly supported generator psi = psi1 (x) phi1: a Daubechies
// wavelet sampled by the cascade algorithm and a centered cardinal B-spline
// window, both placed in a common generator coordinate system.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace bendlab {

namespace detail {

/// All complex roots of sum_k c[k] z^k (Aberth iteration, then Newton polish).
inline std::vector<std::complex<long double>> polynomial_roots(const std::vector<long double>& c) {
    using cplx = std::complex<long double>;
    const std::size_t n = c.size() - 1;
    std::vector<cplx> roots;
    if (n == 0) return roots;
    const long double lead = c[n];
    auto eval = [&](cplx z, cplx& dp) {
        cplx p = c[n] / lead;
        dp = 0;
        for (std::size_t k = n; k-- > 0;) {
            dp = dp * z + p;
            p = p * z + c[k] / lead;
        }
        return p;
    };
    long double bound = 0;
    for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k] / lead));
    bound += 1;
    roots.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const long double ang = 2.0L * std::numbers::pi_v<long double> * k / n + 0.4L;
        roots[k] = std::polar(0.5L * bound, ang);
    }
    for (int iter = 0; iter < 500; ++iter) {
        long double change = 0;
        for (std::size_t k = 0; k < n; ++k) {
            cplx dp;
            const cplx p = eval(roots[k], dp);
            const cplx ratio = p / dp;
            cplx sum = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) sum += 1.0L / (roots[k] - roots[j]);
            const cplx step = ratio / (1.0L - ratio * sum);
            roots[k] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-30L) break;
    }
    for (auto& z : roots) {
        for (int it = 0; it < 5; ++it) {
            cplx dp;
            const cplx p = eval(z, dp);
            if (std::abs(dp) == 0) break;
            z -= p / dp;
        }
    }
    return roots;
}

/// Uncentered cardinal B-spline of order k (degree k-1) on [0, k], by the
/// de Boor triangle on integer knots.
inline double cardinal_bspline(int k, double x) {
    if (!(x >= 0.0 && x < static_cast<double>(k))) return 0.0;
    // b[i] holds B_m(x - j + m - 1 - i) restricted to the m pieces that are
    // nonzero at x; j = floor(x).
    std::array<double, 64> b;
    const int j = static_cast<int>(std::floor(x));
    const double f = x - j;
    b[0] = 1.0;
    for (int m = 2; m <= k; ++m) {
        const double inv = 1.0 / (m - 1);
        // new values for shifts y = f + i, i = 0..m-1
        double carry = 0.0;
        for (int i = 0; i < m - 1; ++i) {
            const double y = f + i;
            const double t = b[i] * inv;
            b[i] = carry + y * t;
            carry = (m - y - 1.0) * t;
        }
        b[m - 1] = carry;
    }
    // B_k(x) is the term with shift y = x, i.e. i = j
    return b[j];
}

// Gauss-Legendre nodes/weights on [-1, 1], 8 points.
inline constexpr std::array<double, 8> kGL8x = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGL8w = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace detail

inline constexpr int kMaxDaubechiesOrder = 10;
inline constexpr int kDefaultCascadeDepth = 10;

/// Orthonormal minimum-phase Daubechies low-pass filter with M vanishing
/// moments (2M taps, sum sqrt(2)), from the spectral factorization of the
/// Daubechies polynomial.
inline std::vector<double> daubechies_filter(int M) {
    if (M < 1 || M > kMaxDaubechiesOrder)
        throw ConfigError("Daubechies order M must lie in [1, " + std::to_string(kMaxDaubechiesOrder) +
                          "], got " + std::to_string(M));
    using cplx = std::complex<long double>;
    std::vector<long double> p(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) {
        long double binom = 1;
        for (int i = 1; i <= k; ++i) binom = binom * (M - 1 + i) / i;
        p[static_cast<std::size_t>(k)] = binom;
    }
    std::vector<cplx> h{1.0L};
    auto multiply = [&h](cplx root) {
        std::vector<cplx> out(h.size() + 1, 0);
        for (std::size_t i = 0; i < h.size(); ++i) {
            out[i] += h[i];
            out[i + 1] -= root * h[i];
        }
        h = std::move(out);
    };
    for (const cplx y : detail::polynomial_roots(p)) {
        const cplx c = 2.0L - 4.0L * y;
        const cplx disc = std::sqrt(c * c - 4.0L);
        const cplx z1 = (c + disc) / 2.0L;
        const cplx z2 = (c - disc) / 2.0L;
        multiply(std::abs(z1) < 1.0L ? z1 : z2);
    }
    for (int k = 0; k < M; ++k) multiply(-1.0L);
    long double sum = 0;
    for (const auto& v : h) sum += v.real();
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        out[i] = static_cast<double>(h[i].real() / sum * std::numbers::sqrt2_v<long double>);
    return out;
}

/// Scaling function samples on [0, N] at spacing 2^-depth (N = taps - 1).
inline std::vector<double> cascade_scaling_function(const std::vector<double>& h, int depth) {
    const int N = static_cast<int>(h.size()) - 1;
    const double r2 = std::numbers::sqrt2;
    std::vector<double> vals(static_cast<std::size_t>(N + 1), 0.0);
    if (N == 1) {
        // Haar: take the mean of the one-sided limits at the jumps so that the
        // interpolated samples keep a vanishing mean.
        vals = {0.5, 0.5};
    } else {
        // phi at the integers: eigenvector of [sqrt2 h_{2i-k}] for eigenvalue 1,
        // normalized to unit sum. The last row is replaced by the normalization
        // because the rows of (A - I) sum to zero.
        const std::size_t n = static_cast<std::size_t>(N + 1);
        std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
        for (int i = 0; i <= N; ++i)
            for (int k = 0; k <= N; ++k) {
                const int j = 2 * i - k;
                A[i][k] = (j >= 0 && j <= N ? r2 * h[static_cast<std::size_t>(j)] : 0.0) - (i == k ? 1.0 : 0.0);
            }
        for (std::size_t k = 0; k < n; ++k) A[n - 1][k] = 1.0;
        A[n - 1][n] = 1.0;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            std::swap(A[col], A[piv]);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col || A[r][col] == 0.0) continue;
                const double f = A[r][col] / A[col][col];
                for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
            }
        }
        for (std::size_t i = 0; i < n; ++i) vals[i] = A[i][n] / A[i][i];
        vals.front() = 0.0;
        vals.back() = 0.0;
    }
    for (int lev = 0; lev < depth; ++lev) {
        const long per_unit = 1L << lev;
        const std::size_t m = vals.size();
        std::vector<double> next(2 * (m - 1) + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) next[2 * i] = vals[i];
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const long x2 = static_cast<long>(2 * i + 1);
            double s = 0.0;
            for (int k = 0; k <= N; ++k) {
                const long idx = x2 - k * per_unit;
                if (idx >= 0 && idx < static_cast<long>(m)) s += h[static_cast<std::size_t>(k)] * vals[static_cast<std::size_t>(idx)];
            }
            next[2 * i + 1] = r2 * s;
        }
        vals = std::move(next);
    }
    return vals;
}

/// Sampled 1-D wavelet with piecewise linear interpolation between samples.
/// The samples describe psi1 on [lo, lo + step*(n-1)] and it is zero elsewhere.
class Wavelet1D {
public:
    Wavelet1D() = default;
    Wavelet1D(double lo, double step, std::vector<double> samples, int vanishing_moments)
        : lo_(lo), step_(step), samples_(std::move(samples)), M_(vanishing_moments) {
        if (samples_.size() < 2 || !(step_ > 0.0)) throw ConfigError("wavelet needs at least two samples");
        primitive_.assign(samples_.size(), 0.0);
        for (std::size_t i = 1; i < samples_.size(); ++i)
            primitive_[i] = primitive_[i - 1] + 0.5 * step_ * (samples_[i - 1] + samples_[i]);
        sup_norm_ = 0.0;
        for (double v : samples_) sup_norm_ = std::max(sup_norm_, std::abs(v));
    }

    double lo() const { return lo_; }
    double hi() const { return lo_ + step_ * static_cast<double>(samples_.size() - 1); }
    double step() const { return step_; }
    int vanishing_moments() const { return M_; }
    double sup_norm() const { return sup_norm_; }
    const std::vector<double>& samples() const { return samples_; }

    double operator()(double x) const {
        const double v = (x - lo_) / step_;
        if (!(v >= 0.0) || v > static_cast<double>(samples_.size() - 1)) return 0.0;
        const std::size_t i = std::min(static_cast<std::size_t>(v), samples_.size() - 2);
        const double f = v - static_cast<double>(i);
        return samples_[i] + f * (samples_[i + 1] - samples_[i]);
    }

    /// Exact antiderivative of the interpolant, zero at lo().
    double primitive(double x) const {
        const double v = (x - lo_) / step_;
        if (!(v > 0.0)) return 0.0;
        if (v >= static_cast<double>(samples_.size() - 1)) return primitive_.back();
        const std::size_t i = static_cast<std::size_t>(v);
        const double f = v - static_cast<double>(i);
        return primitive_[i] + step_ * f * (samples_[i] + 0.5 * f * (samples_[i + 1] - samples_[i]));
    }

    /// Trapezoid moment integral of (x - origin)^k psi1; with |.| when absolute.
    double moment(int k, double origin, bool absolute = false) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const double x = lo_ + step_ * static_cast<double>(i) - origin;
            double v = std::pow(x, k) * samples_[i];
            if (absolute) v = std::abs(v);
            const double w = (i == 0 || i + 1 == samples_.size()) ? 0.5 : 1.0;
            acc += w * v;
        }
        return acc * step_;
    }

    /// True when |moment k| <= tol * (absolute moment k) for all k < M.
    bool has_vanishing_moments(double tol = 1e-6) const {
        const double c = 0.5 * (lo() + hi());
        for (int k = 0; k < M_; ++k)
            if (std::abs(moment(k, c)) > tol * moment(k, c, true)) return false;
        return true;
    }

    double l2_norm() const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
            const double a = samples_[i], b = samples_[i + 1];
            acc += (a * a + a * b + b * b) / 3.0;
        }
        return std::sqrt(acc * step_);
    }

    /// Location of the extremum of |primitive|, refined to the zero crossing
    /// of the interpolant next to the extremal sample.
    double primitive_peak() const {
        std::size_t best = 0;
        for (std::size_t i = 0; i < primitive_.size(); ++i)
            if (std::abs(primitive_[i]) > std::abs(primitive_[best])) best = i;
        auto crossing = [&](std::size_t i) {
            const double a = samples_[i], b = samples_[i + 1];
            return lo_ + step_ * (static_cast<double>(i) + a / (a - b));
        };
        if (best > 0 && (samples_[best - 1] > 0.0) != (samples_[best] > 0.0) && samples_[best] != 0.0)
            return crossing(best - 1);
        if (best + 1 < samples_.size() && (samples_[best] > 0.0) != (samples_[best + 1] > 0.0) &&
            samples_[best] != 0.0)
            return crossing(best);
        return lo_ + step_ * static_cast<double>(best);
    }

    /// psi1(x / scale + center): the same samples on a dilated, shifted grid.
    Wavelet1D placed(double center, double scale) const {
        return Wavelet1D((lo_ - center) * scale, step_ * scale, samples_, M_);
    }

private:
    double lo_ = 0.0;
    double step_ = 1.0;
    std::vector<double> samples_;
    std::vector<double> primitive_;
    int M_ = 1;
    double sup_norm_ = 0.0;
};

/// Daubechies wavelet with M vanishing moments on [0, 2M-1], cascade depth
/// `depth` (grid step 2^-depth).
inline Wavelet1D build_daubechies(int M, int depth = kDefaultCascadeDepth) {
    if (depth < 8 || depth > 16) throw ConfigError("cascade depth must lie in [8, 16]");
    const std::vector<double> h = daubechies_filter(M);
    const int N = static_cast<int>(h.size()) - 1;
    const std::vector<double> phi = cascade_scaling_function(h, depth);
    const long per_unit = 1L << depth;
    const std::size_t n = static_cast<std::size_t>(N * per_unit + 1);
    std::vector<double> psi(n, 0.0);
    const double r2 = std::numbers::sqrt2;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k <= N; ++k) {
            const long idx = 2 * static_cast<long>(i) - k * per_unit;
            if (idx < 0 || idx >= static_cast<long>(phi.size())) continue;
            const double g = ((k % 2) ? -1.0 : 1.0) * h[static_cast<std::size_t>(N - k)];
            s += g * phi[static_cast<std::size_t>(idx)];
        }
        psi[i] = r2 * s;
    }
    return Wavelet1D(0.0, 1.0 / static_cast<double>(per_unit), std::move(psi), M);
}

/// Centered cardinal B-spline window of order k, optionally dilated so that
/// its support becomes [-width/2, width/2].
class Window1D {
public:
    Window1D() = default;
    explicit Window1D(int order, double scale = 1.0) : k_(order), scale_(scale) {
        if (order < 2 || order > 60) throw ConfigError("spline order must lie in [2, 60]");
        if (!(scale > 0.0)) throw ConfigError("window scale must be positive");
    }

    int order() const { return k_; }
    int smoothness() const { return k_ - 2; }
    double scale() const { return scale_; }
    double lo() const { return -0.5 * k_ * scale_; }
    double hi() const { return 0.5 * k_ * scale_; }

    std::vector<double> knots() const {
        std::vector<double> out(static_cast<std::size_t>(k_ + 1));
        for (int i = 0; i <= k_; ++i) out[static_cast<std::size_t>(i)] = lo() + i * scale_;
        return out;
    }

    double operator()(double x) const { return detail::cardinal_bspline(k_, x / scale_ + 0.5 * k_); }

    double integral() const { return scale_; }

    double l2_norm() const {
        double acc = 0.0;
        const auto kn = knots();
        for (std::size_t i = 0; i + 1 < kn.size(); ++i) {
            const double c = 0.5 * (kn[i] + kn[i + 1]);
            const double hw = 0.5 * (kn[i + 1] - kn[i]);
            // Two 8-point panels per knot span: exact for degree <= 31.
            for (int half = 0; half < 2; ++half) {
                const double cc = c + (half ? 0.5 : -0.5) * hw;
                for (std::size_t q = 0; q < 8; ++q) {
                    const double v = (*this)(cc + 0.5 * hw * detail::kGL8x[q]);
                    acc += 0.5 * hw * detail::kGL8w[q] * v * v;
                }
            }
        }
        return std::sqrt(acc);
    }

private:
    int k_ = 2;
    double scale_ = 1.0;
};

inline Window1D build_spline_window(int order) { return Window1D(order); }

enum class WaveletCentering { primitive_peak, support_midpoint };

/// Reproducible description of a generator pair.
struct GeneratorDescriptor {
    int M = 8;
    int depth = kDefaultCascadeDepth;
    /// Support length of psi1 in generator coordinates.
    double wavelet_width = 0.125;
    WaveletCentering centering = WaveletCentering::primitive_peak;
    int window_order = 11;
    /// Support length of phi1 in generator coordinates.
    double window_width = 0.25;

    friend bool operator==(const GeneratorDescriptor&, const GeneratorDescriptor&) = default;
};

struct TheoremConditionReport {
    double phi_at_zero = 0.0;
    /// Integral of psi1(x1) over {x1 <= -x2^2} within the support box.
    double lower_parabola_integral = 0.0;
    /// Integral of psi1(x1) over {x1 >= x2^2} within the support box.
    double upper_parabola_integral = 0.0;
    bool phi_at_zero_ok = false;
    bool lower_ok = false;
    bool upper_ok = false;
    bool smoothness_ok = false;
    std::vector<std::string> warnings;

    bool lower_bounds_licensed() const { return phi_at_zero_ok && lower_ok && upper_ok; }
};

/// psi(x) = psi1(x1) phi1(x2) in generator coordinates.
class GeneratorPair {
public:
    GeneratorPair(Wavelet1D psi1, Window1D phi1, GeneratorDescriptor desc = {})
        : psi1_(std::move(psi1)), phi1_(phi1), desc_(desc) {
        if (phi1_.smoothness() <= psi1_.vanishing_moments())
            warnings_.push_back("window smoothness L=" + std::to_string(phi1_.smoothness()) +
                                " does not exceed M=" + std::to_string(psi1_.vanishing_moments()));
        l2_norm_ = psi1_.l2_norm() * phi1_.l2_norm();
        compute_half_plane_integrals();
    }

    static GeneratorPair from_descriptor(const GeneratorDescriptor& d) {
        if (!(d.wavelet_width > 0.0) || !(d.window_width > 0.0))
            throw ConfigError("generator support widths must be positive");
        const Wavelet1D native = build_daubechies(d.M, d.depth);
        const double support = native.hi() - native.lo();
        const double center =
            d.centering == WaveletCentering::primitive_peak ? native.primitive_peak() : 0.5 * (native.lo() + native.hi());
        Wavelet1D psi1 = native.placed(center, d.wavelet_width / support);
        Window1D phi1(d.window_order, d.window_width / d.window_order);
        return GeneratorPair(std::move(psi1), phi1, d);
    }

    static GeneratorPair make_default() { return from_descriptor(GeneratorDescriptor{}); }

    const Wavelet1D& psi1() const { return psi1_; }
    const Window1D& phi1() const { return phi1_; }
    const GeneratorDescriptor& descriptor() const { return desc_; }
    int vanishing_moments() const { return psi1_.vanishing_moments(); }
    double l2_norm() const { return l2_norm_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    Box support_box() const { return {{psi1_.lo(), phi1_.lo()}, {psi1_.hi(), phi1_.hi()}}; }

    double operator()(Point x) const {
        if (!support_box().contains(x)) return 0.0;
        return psi1_(x.x1) * phi1_(x.x2);
    }

    double lower_parabola_integral() const { return lower_integral_; }
    double upper_parabola_integral() const { return upper_integral_; }

private:
    void compute_half_plane_integrals() {
        const double lo2 = phi1_.lo(), hi2 = phi1_.hi();
        auto strip = [&](double half) {
            return std::max(0.0, std::min(half, hi2) - std::max(-half, lo2));
        };
        lower_integral_ = 0.0;
        upper_integral_ = 0.0;
        const double step = psi1_.step();
        const std::size_t cells = psi1_.samples().size() - 1;
        for (std::size_t i = 0; i < cells; ++i) {
            double a = psi1_.lo() + step * static_cast<double>(i);
            double b = a + step;
            // Split the cell at x1 = 0 so the sqrt kink sits on a panel edge.
            const double cuts[3] = {a, (a < 0.0 && b > 0.0) ? 0.0 : b, b};
            for (int p = 0; p < 2; ++p) {
                const double u = cuts[p], v = cuts[p + 1];
                if (v <= u) continue;
                const double c = 0.5 * (u + v), hw = 0.5 * (v - u);
                for (std::size_t q = 0; q < 8; ++q) {
                    const double x = c + hw * detail::kGL8x[q];
                    const double w = hw * detail::kGL8w[q] * psi1_(x);
                    if (x < 0.0) lower_integral_ += w * strip(std::sqrt(-x));
                    else upper_integral_ += w * strip(std::sqrt(x));
                }
            }
        }
    }

    Wavelet1D psi1_;
    Window1D phi1_;
    GeneratorDescriptor desc_;
    double l2_norm_ = 0.0;
    double lower_integral_ = 0.0;
    double upper_integral_ = 0.0;
    std::vector<std::string> warnings_;
};

inline double eval_generator(const GeneratorPair& g, Point x) { return g(x); }

inline TheoremConditionReport verify_theorem_conditions(const GeneratorPair& g, double threshold = 1e-8) {
    TheoremConditionReport r;
    r.phi_at_zero = g.phi1()(0.0);
    r.lower_parabola_integral = g.lower_parabola_integral();
    r.upper_parabola_integral = g.upper_parabola_integral();
    r.phi_at_zero_ok = std::abs(r.phi_at_zero) > threshold;
    r.lower_ok = std::abs(r.lower_parabola_integral) > threshold;
    r.upper_ok = std::abs(r.upper_parabola_integral) > threshold;
    r.smoothness_ok = g.phi1().smoothness() > g.vanishing_moments();
    if (!r.phi_at_zero_ok) r.warnings.push_back("phi1(0) vanishes; wrong-bending positive limit not guaranteed");
    if (!r.lower_ok) r.warnings.push_back("integral of psi1 over {x1 <= -x2^2} vanishes");
    if (!r.upper_ok) r.warnings.push_back("integral of psi1 over {x1 >= x2^2} vanishes");
    if (!r.smoothness_ok) r.warnings.push_back("window smoothness L does not exceed M");
    return r;
}

}  // namespace bendlab
