#include <catch_amalgamated.hpp>

#include <random>

#include "bendlab/geometry.hpp"

using namespace bendlab;
using Catch::Approx;

TEST_CASE("alpha scaling", "[geometry]") {
    SECTION("a = 1 is the identity") {
        const Point y = apply_alpha_scale(AlphaScale(1.0, 0.5), {3.0, 7.0});
        CHECK(y == Point{3.0, 7.0});
    }
    SECTION("parabolic scaling") {
        const Point y = apply_alpha_scale(AlphaScale(4.0, 0.5), {1.0, 1.0});
        CHECK(y.x1 == 4.0);
        CHECK(y.x2 == Approx(2.0).epsilon(1e-15));
    }
    SECTION("fractional exponent") {
        // 0.5^0.335 evaluated independently as exp(0.335 ln 0.5)
        const Point y = apply_alpha_scale(AlphaScale(0.5, 0.335), {1.0, 1.0});
        CHECK(y.x1 == 0.5);
        CHECK(y.x2 == Approx(0.7927841366102845).epsilon(1e-14));
    }
    SECTION("determinant and composition") {
        const AlphaScale s(0.3, 0.335);
        CHECK(s.determinant() == Approx(std::pow(0.3, 1.335)).epsilon(1e-14));
        const AlphaScale s1(0.3, 0.4), s2(0.7, 0.4), s12(0.21, 0.4);
        const Point x{1.3, -0.8};
        const Point y = apply_alpha_scale(s1, apply_alpha_scale(s2, x));
        const Point z = apply_alpha_scale(s12, x);
        CHECK(y.x1 == Approx(z.x1).epsilon(1e-14));
        CHECK(y.x2 == Approx(z.x2).epsilon(1e-14));
    }
    SECTION("invalid parameters") {
        CHECK_THROWS_AS(AlphaScale(0.0, 0.5), DomainError);
        CHECK_THROWS_AS(AlphaScale(-1.0, 0.5), DomainError);
        CHECK_THROWS_AS(AlphaScale(0.5, 1.5), DomainError);
        CHECK_THROWS_AS(AlphaScale(0.5, -0.1), DomainError);
    }
    SECTION("inverse") {
        const AlphaScale s(0.125, 0.335);
        const Point x{0.4, -1.1};
        const Point y = apply_inverse_alpha_scale(s, apply_alpha_scale(s, x));
        CHECK(y.x1 == Approx(x.x1).epsilon(1e-15));
        CHECK(y.x2 == Approx(x.x2).epsilon(1e-15));
    }
}

TEST_CASE("higher order shearing", "[geometry]") {
    SECTION("zero shear is the identity") {
        CHECK(apply_shear(ShearParams({0.0, 0.0}), {5.0, -2.0}) == Point{5.0, -2.0});
    }
    SECTION("first order is an ordinary shear") {
        const Point y = apply_shear(ShearParams({0.7}), {1.0, 2.0});
        CHECK(y == Point{1.0 + 0.7 * 2.0, 2.0});
    }
    SECTION("worked second order example") {
        // (0 + (1 + 0.5 * 2) * 2, 2) by hand
        CHECK(apply_shear(ShearParams({1.0, 0.5}), {0.0, 2.0}) == Point{4.0, 2.0});
        CHECK(apply_inverse_shear(ShearParams({1.0, 0.5}), {4.0, 2.0}) == Point{0.0, 2.0});
    }
    SECTION("order limits") {
        CHECK_THROWS_AS(ShearParams(std::vector<double>{}), DomainError);
        CHECK_THROWS_AS(ShearParams({1, 2, 3, 4, 5}), DomainError);
        CHECK_NOTHROW(ShearParams({1, 2, 3, 4, 5}, 5));
        CHECK(ShearParams({1, 2, 3}).order() == 3);
    }
    SECTION("negation") {
        const ShearParams n = ShearParams({1.0, -2.0, 3.0}).negated();
        CHECK(std::vector<double>(n.coefficients().begin(), n.coefficients().end()) == std::vector<double>{-1.0, 2.0, -3.0});
    }
}

TEST_CASE("shear invariants on random inputs", "[geometry][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> r(static_cast<std::size_t>(1 + i % 4));
        for (auto& v : r) v = u(rng);
        const ShearParams sh(r);
        const Point x{u(rng), u(rng)};
        const Point y = apply_shear(sh, x);
        CHECK(y.x2 == x.x2);
        const Point z = apply_inverse_shear(sh, y);
        CHECK(z.x2 == x.x2);
        CHECK(std::abs(z.x1 - x.x1) <= 1e-12 * (1.0 + std::abs(y.x1)));
        // the inverse is the shear with negated coefficients
        const Point w = apply_shear(sh.negated(), y);
        CHECK(w.x1 == z.x1);
    }
    SECTION("first order shears add") {
        for (int i = 0; i < 200; ++i) {
            const double r1 = u(rng), r2 = u(rng);
            const Point x{u(rng), u(rng)};
            const Point y = apply_shear(ShearParams({r1}), apply_shear(ShearParams({r2}), x));
            const Point z = apply_shear(ShearParams({r1 + r2}), x);
            CHECK(y.x1 == Approx(z.x1).margin(1e-12));
        }
    }
}

TEST_CASE("representation argument", "[geometry]") {
    SECTION("identity parameters") {
        const HigherOrderParams p{AlphaScale(1.0, 0.5), ShearParams({0.0, 0.0}), {0.0, 0.0}};
        CHECK(representation_arg(p, {0.3, -0.2}) == Point{0.3, -0.2});
    }
    SECTION("pure translation") {
        const HigherOrderParams p{AlphaScale(1.0, 0.5), ShearParams({0.0, 0.0}), {1.0, 0.0}};
        CHECK(representation_arg(p, {1.0, 0.0}) == Point{0.0, 0.0});
    }
    SECTION("worked bendlet example") {
        // x - t = (-0.1, 0.2); S_{(0, 0.5)} -> (-0.08, 0.2); A^{-1} -> (-0.32, 0.4)
        const HigherOrderParams p{AlphaScale(0.25, 0.5), ShearParams({0.0, -0.5}), {1.0, 0.0}};
        const Point y = representation_arg(p, {0.9, 0.2});
        CHECK(y.x1 == Approx(-0.32).epsilon(1e-12));
        CHECK(y.x2 == Approx(0.4).epsilon(1e-12));
    }
    SECTION("bendlet parameters convert to second order") {
        const BendletParams bp{0.25, 0.1, -0.5, {1.0, 0.0}, Cone::horizontal};
        const HigherOrderParams p = bp.to_higher_order(0.5);
        REQUIRE(p.shear.order() == 2);
        CHECK(p.shear.coefficients()[0] == 0.1);
        CHECK(p.shear.coefficients()[1] == -0.5);
        CHECK_THROWS_AS((BendletParams{1.0, 0.0, 0.0, {}, Cone::horizontal}.validate()), DomainError);
        CHECK_THROWS_AS((BendletParams{0.5, 1.5, 0.0, {}, Cone::horizontal}.validate()), DomainError);
    }
}

TEST_CASE("cone swap", "[geometry]") {
    CHECK(cone_swap({1.0, 2.0}) == Point{2.0, 1.0});
    const Point x{-0.3, 0.8};
    CHECK(cone_swap(cone_swap(x)) == x);
    CHECK(cone_from_iota(1) == Cone::horizontal);
    CHECK(cone_from_iota(-1) == Cone::vertical);
    CHECK_THROWS_AS(cone_from_iota(0), DomainError);
    CHECK(opposite(Cone::vertical) == Cone::horizontal);
}

TEST_CASE("shear offset range matches dense sampling", "[geometry]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> r(static_cast<std::size_t>(1 + i % 4));
        for (auto& v : r) v = u(rng);
        const ShearParams sh(r);
        const double lo = -0.7, hi = 0.9;
        const auto [mn, mx] = shear_offset_range(sh, lo, hi);
        double smn = 1e300, smx = -1e300;
        for (int k = 0; k <= 20000; ++k) {
            const double v = sh.offset(lo + (hi - lo) * k / 20000.0);
            smn = std::min(smn, v);
            smx = std::max(smx, v);
        }
        CHECK(mn <= smn + 1e-12);
        CHECK(mx >= smx - 1e-12);
        CHECK(mn == Approx(smn).margin(1e-6));
        CHECK(mx == Approx(smx).margin(1e-6));
    }
}
