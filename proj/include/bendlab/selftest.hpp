#pragma once

// Structural invariant suite shared by the CLI and the tests.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "signals.hpp"
#include "transform.hpp"

namespace bendlab {

struct SelftestRow {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

inline double worst_moment_ratio(const Wavelet1D& w) {
    const double c = 0.5 * (w.lo() + w.hi());
    double worst = 0.0;
    for (int k = 0; k < w.vanishing_moments(); ++k)
        worst = std::max(worst, std::abs(w.moment(k, c)) / w.moment(k, c, true));
    return worst;
}

inline std::vector<SelftestRow> run_selftest(const GeneratorPair& g, unsigned long long seed = 1) {
    std::vector<SelftestRow> rows;
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    rows.push_back({"vanishing moments (M=8)", worst_moment_ratio(build_daubechies(8)), 1e-6, false});

    double shear_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> r(static_cast<std::size_t>(1 + i % 4));
        for (auto& v : r) v = uni(-3.0, 3.0);
        const ShearParams sh(r);
        const Point x{uni(-2.0, 2.0), uni(-2.0, 2.0)};
        const Point y = apply_inverse_shear(sh, apply_shear(sh, x));
        shear_err = std::max({shear_err, std::abs(y.x1 - x.x1) / (1.0 + std::abs(x.x1)), std::abs(y.x2 - x.x2)});
    }
    rows.push_back({"inverse shear identity", shear_err, 1e-12, false});

    double iso = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double a = std::exp2(-uni(0.0, 9.0));
        const Cone cone = i % 2 ? Cone::vertical : Cone::horizontal;
        const Atom at(g, HigherOrderParams{AlphaScale(a, 0.335), ShearParams({uni(-1.0, 1.0), uni(-5.0, 5.0)}),
                                           {uni(-0.5, 0.5), uni(-0.5, 0.5)}},
                      cone);
        iso = std::max(iso, std::abs(atom_l2_norm(at) / g.l2_norm() - 1.0));
    }
    rows.push_back({"atom isometry", iso, 0.01, false});

    const Signal one(Region{Plane{}});
    double cst = 0.0;
    for (int i = 0; i < 8; ++i) {
        QuadratureSpec spec;
        if (i % 2) spec.method = QuadratureSpec::Method::grid;
        const BendletParams bp{std::exp2(-uni(1.0, 7.0)), uni(-1.0, 1.0), uni(-5.0, 5.0), {uni(-0.5, 0.5), uni(-0.5, 0.5)},
                               i % 4 < 2 ? Cone::horizontal : Cone::vertical};
        cst = std::max(cst, std::abs(coefficient(one, g, bp, 0.335, spec)));
    }
    rows.push_back({"constant annihilation", cst, 1e-8, false});

    double qp = 0.0;
    for (int i = 0; i < 5; ++i)
        qp = std::max(qp, qp_shear_identity_check(g, uni(-2.0, 2.0), std::exp2(-uni(0.0, 6.0)), uni(-1.0, 1.0),
                                                  {uni(-0.5, 0.5), uni(-0.5, 0.5)}, 1000, seed + i));
    rows.push_back({"Q_p identity (alpha=0)", qp, 1e-9, false});

    double ordering_violations = 0.0;
    for (int ia = 1; ia < 50; ++ia)
        for (int M = 1; M <= 10; ++M) {
            const auto r = theoretical_rates(0.5 * ia / 50.0, M);
            if (!(r.matched < r.wrong_bending && r.wrong_bending < r.wrong_shear)) ordering_violations += 1.0;
        }
    rows.push_back({"rate ordering (alpha, M mesh)", ordering_violations, 0.0, false});

    const auto tc = verify_theorem_conditions(g);
    const double tmin = std::min({std::abs(tc.phi_at_zero), std::abs(tc.lower_parabola_integral),
                                  std::abs(tc.upper_parabola_integral)});
    rows.push_back({"theorem conditions (min |value|)", tmin, 1e-8, false});

    for (auto& r : rows) {
        if (r.name.rfind("theorem", 0) == 0) r.pass = r.value > r.threshold;
        else r.pass = r.value <= r.threshold;
    }
    return rows;
}

inline bool print_selftest(std::ostream& os, const std::vector<SelftestRow>& rows) {
    bool ok = true;
    os << std::left << std::setw(36) << "check" << std::setw(14) << "value" << std::setw(12) << "threshold"
       << "result\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(36) << r.name << std::setw(14) << std::setprecision(4) << r.value
           << std::setw(12) << r.threshold << (r.pass ? "PASS" : "FAIL") << '\n';
        ok = ok && r.pass;
    }
    return ok;
}

}  // namespace bendlab
