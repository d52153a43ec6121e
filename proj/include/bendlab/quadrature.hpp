#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration on an initial partition.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace bendlab {

namespace detail {

inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kKronrodX[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGauss7W = {0.129484966168869693270611432679082,
                                                   0.279705391489276667901467771423780,
                                                   0.381830050505118944950369775488975,
                                                   0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kKronrodW[7];
    double g = fc * kGauss7W[3];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = hw * kKronrodX[i];
        const double s = f(c - dx) + f(c + dx);
        k += kKronrodW[i] * s;
        if (i % 2 == 1) g += kGauss7W[i / 2] * s;
    }
    return {a, b, k * hw, std::abs((k - g) * hw)};
}

}  // namespace detail

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

/// Integrates f over [knots.front(), knots.back()], starting from the panels
/// between consecutive knots and bisecting the worst panel until the summed
/// error estimate is below max(rel_tol*|I|, abs_tol) or max_panels is hit.
template <class F>
QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& knots, double rel_tol, double abs_tol,
                                    std::size_t max_panels = 2000) {
    std::priority_queue<detail::Panel> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i + 1] > knots[i])) continue;
        const auto p = detail::gauss_kronrod_15(f, knots[i], knots[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    auto done = [&] { return err <= std::max(rel_tol * std::abs(total), abs_tol); };
    while (!heap.empty() && !done() && heap.size() < max_panels) {
        const auto worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            heap.push({worst.a, worst.b, worst.value, 0.0});
            err -= worst.error;
            continue;
        }
        const auto l = detail::gauss_kronrod_15(f, worst.a, m);
        const auto r = detail::gauss_kronrod_15(f, m, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    QuadratureResult out;
    out.converged = done();
    out.panels = heap.size();
    // Re-sum in panel order so the result does not carry the running-sum drift.
    std::vector<detail::Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    for (const auto& p : all) {
        out.value += p.value;
        out.error += p.error;
    }
    return out;
}

}  // namespace bendlab
