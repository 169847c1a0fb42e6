#include "doctest.h"

#include "momentforge/moment.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace momentforge;
using namespace momentforge::moment;
using geom::Coefficient;
using geom::FlatTorusFactor;
using geom::SignConvention;
using geom::SphereFactor;
using ratlin::Rational;

namespace {

std::vector<Coefficient> standard(std::size_t n) {
    std::vector<Coefficient> w(n * n, Coefficient::exact(Rational(0)));
    for (std::size_t p = 0; p < n / 2; ++p) {
        w[(2 * p) * n + 2 * p + 1] = Coefficient::exact(Rational(1));
        w[(2 * p + 1) * n + 2 * p] = Coefficient::exact(Rational(-1));
    }
    return w;
}

ProductManifold torus(std::size_t n) { return ProductManifold(FlatTorusFactor(n, standard(n)), {}); }

ProductManifold spheres(std::size_t k, const Rational& c = Rational(1)) {
    return ProductManifold(std::nullopt, std::vector<SphereFactor>(k, SphereFactor(Coefficient::exact(c))));
}

ProductManifold s2xt2() {
    return ProductManifold(FlatTorusFactor(2, standard(2)), {SphereFactor(Coefficient::exact(Rational(1)))});
}

GeneralizedMoment build(const ProductManifold& m, const ActionSpec& a) {
    return generalized_moment(m, a, hamclass::classify_action(hamclass::period_matrix(m, a)));
}

}  // namespace

TEST_CASE("hamiltonian_component examples") {
    ProductManifold s2 = spheres(1);
    auto mu = build(s2, ActionSpec(s2, {{{}, {1}}}));
    REQUIRE(mu.c() == 1);
    CHECK(mu.r() == 0);
    for (double h : {-1.0, -0.3, 0.0, 0.8, 1.0}) CHECK(mu.mu1[0](s2, {0.4, h}) == doctest::Approx(h));

    auto doubled = build(s2, ActionSpec(s2, {{{}, {2}}}));
    CHECK(doubled.mu1[0](s2, {0.4, 0.25}) == doctest::Approx(0.5));

    ProductManifold s2s2 = spheres(2);
    auto sq = build(s2s2, ActionSpec(s2s2, {{{}, {1, 0}}, {{}, {0, 1}}}));
    REQUIRE(sq.c() == 2);
    double lo0 = 1, hi0 = -1, lo1 = 1, hi1 = -1;
    for (const auto& p : geom::sample_points(s2s2, 2000, 3)) {
        auto v = sq(p);
        CHECK(v.mu1[0] == doctest::Approx(p[1]));
        CHECK(v.mu1[1] == doctest::Approx(p[3]));
        lo0 = std::min(lo0, v.mu1[0]);
        hi0 = std::max(hi0, v.mu1[0]);
        lo1 = std::min(lo1, v.mu1[1]);
        hi1 = std::max(hi1, v.mu1[1]);
    }
    CHECK(lo0 < -0.95);
    CHECK(hi0 > 0.95);
    CHECK(lo1 < -0.95);
    CHECK(hi1 > 0.95);

    ProductManifold t2 = torus(2);
    CHECK_THROWS_AS(hamiltonian_components(t2, ActionSpec(t2, {{{1, 0}, {}}}),
                                           hamclass::classify_action(hamclass::period_matrix(t2, ActionSpec(t2, {{{1, 0}, {}}})))),
                    MomentError);
}

TEST_CASE("d mu1 = i_X omega' by central differences") {
    ProductManifold m(FlatTorusFactor(2, standard(2)),
                      {SphereFactor(Coefficient::exact(Rational(3, 2))), SphereFactor(Coefficient::exact(Rational(1)))});
    for (auto sign : {SignConvention::Plus, SignConvention::Minus}) {
        ActionSpec a(m, {{{0, 0}, {1, 2}}, {{0, 0}, {0, -1}}, {{1, 0}, {0, 0}}}, sign);
        auto mu = build(m, a);
        REQUIRE(mu.c() == 2);
        for (const auto& x0 : geom::sample_points(m, 100, 17)) {
            geom::Point x = x0;
            for (std::size_t f = 0; f < 2; ++f) x[m.height_index(f)] *= 0.9;
            for (std::size_t i = 0; i < mu.c(); ++i) {
                const auto& h = mu.mu1[i];
                geom::Tangent field = geom::combination_field(m, a, h.combination).at(m, x);
                for (std::size_t d = 0; d < m.dimension(); ++d) {
                    geom::Tangent e(m.dimension(), 0.0);
                    e[d] = 1.0;
                    const double fd = oracles::central_difference([&](const geom::Point& y) { return h(m, y); }, x, d, 1e-5);
                    CHECK(std::abs(fd - geom::pairing_eval(m, field, e, x)) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("mcduff_component on the 2-torus") {
    ProductManifold t2 = torus(2);
    ActionSpec plus(t2, {{{1, 0}, {}}, {{0, 1}, {}}});
    auto mu = build(t2, plus);
    REQUIRE(mu.r() == 2);
    CHECK(mu.mu2[0].covector == IntVector{0, 1});
    CHECK(mu.mu2[1].covector == IntVector{-1, 0});
    auto minus = build(t2, plus.with_sign(SignConvention::Minus));
    CHECK(minus.mu2[0].covector == IntVector{0, -1});
    CHECK(minus.mu2[1].covector == IntVector{1, 0});
    for (const auto& x : geom::sample_points(t2, 200, 5)) {
        const double p = x[0], q = x[1];
        auto v = mu(x);
        CHECK(CircleValue{v.mu2[0]}.approx_equal(CircleValue::of(q)));
        CHECK(CircleValue{v.mu2[1]}.approx_equal(CircleValue::of(-p)));
        auto w = minus(x);
        CHECK(CircleValue{w.mu2[0]}.approx_equal(CircleValue::of(-q)));
        CHECK(CircleValue{w.mu2[1]}.approx_equal(CircleValue::of(p)));
    }
}

TEST_CASE("mcduff_component: path integration agrees with the closed form") {
    ProductManifold t4 = torus(4);
    ActionSpec a(t4, {{{1, 0, 0, 0}, {}}});
    CircleComponent c = mcduff_component(t4, a, IntVector{1}, default_basepoint(t4));
    CHECK(c.covector == IntVector{0, 1, 0, 0});
    for (const auto& x : geom::sample_points(t4, 1000, 8)) {
        CHECK(c(t4, x).distance(CircleValue::of(x[1])) < 1e-9);
        CHECK(CircleValue::of(c.path_integral(t4, x)).distance(c(t4, x)) < 1e-9);
    }

    ProductManifold m = s2xt2();
    ActionSpec mixed(m, {{{1, 0}, {1}}});
    CircleComponent cm = mcduff_component(m, mixed, IntVector{1}, default_basepoint(m));
    CHECK(cm.sphere_slopes == std::vector<double>{1.0});
    for (const auto& x : geom::sample_points(m, 200, 9))
        CHECK(CircleValue::of(cm.path_integral(m, x)).distance(cm(m, x)) < 1e-9);

    CHECK_THROWS_AS(mcduff_component(spheres(1), ActionSpec(spheres(1), {{{}, {1}}}), IntVector{1},
                                     default_basepoint(spheres(1))),
                    MomentError);
    ProductManifold half(FlatTorusFactor(2, {Coefficient::exact(Rational(0)), Coefficient::exact(Rational(1, 2)),
                                              Coefficient::exact(Rational(-1, 2)), Coefficient::exact(Rational(0))}),
                         {});
    try {
        mcduff_component(half, ActionSpec(half, {{{1, 0}, {}}}), IntVector{1}, default_basepoint(half));
        FAIL("expected a non-integral period");
    } catch (const MomentError& e) {
        CHECK(e.kind() == MomentError::Kind::NonIntegralForm);
    }
}

TEST_CASE("every mu2 component has integral loop periods") {
    ProductManifold t4 = torus(4);
    ActionSpec a(t4, {{{1, 0, 0, 0}, {}}, {{0, 0, 1, 1}, {}}, {{0, 2, 0, 1}, {}}});
    auto mu = build(t4, a);
    for (const auto& c : mu.mu2)
        for (const auto& loop : geom::homology_bases(t4).loops) {
            const double period = geom::integrate_oneform_over_loop(t4, c.field, loop);
            CHECK(std::abs(period - std::round(period)) < 1e-9);
        }
}

TEST_CASE("path_independence_check") {
    ProductManifold t2 = torus(2);
    CircleComponent c = mcduff_component(t2, ActionSpec(t2, {{{1, 0}, {}}}), IntVector{1}, default_basepoint(t2));
    geom::Point x{0.3, 0.45};
    auto r1 = path_independence_check(t2, c, x, {0, 1});
    CHECK(r1.ok());
    CHECK(r1.difference == doctest::Approx(1.0));
    auto r0 = path_independence_check(t2, c, x, {0, 0});
    CHECK(r0.ok());
    CHECK(std::abs(r0.difference) < 1e-12);
    auto r3 = path_independence_check(t2, c, x, {0, 3});
    CHECK(r3.ok());
    CHECK(r3.difference == doctest::Approx(3.0));
    auto rx = path_independence_check(t2, c, x, {2, 0});
    CHECK(std::abs(rx.difference) < 1e-12);
}

TEST_CASE("generalized_moment assembly") {
    ProductManifold m = s2xt2();
    auto mu = build(m, ActionSpec(m, {{{0, 0}, {1}}, {{1, 0}, {0}}}));
    CHECK(mu.c() == 1);
    CHECK(mu.r() == 1);
    for (const auto& x : geom::sample_points(m, 100, 2)) {
        auto v = mu(x);
        CHECK(v.mu1[0] == doctest::Approx(x[3]));
        CHECK(CircleValue{v.mu2[0]}.approx_equal(CircleValue::of(x[1])));
    }
    ProductManifold s2 = spheres(1);
    CHECK(build(s2, ActionSpec(s2, {{{}, {1}}})).r() == 0);
    ProductManifold t2 = torus(2);
    CHECK(build(t2, ActionSpec(t2, {{{1, 0}, {}}, {{0, 1}, {}}})).c() == 0);
}

TEST_CASE("fiber_connected_factorization") {
    auto f = fiber_connected_factorization({0, 2});
    CHECK(f.d == 2);
    CHECK(f.reduced == IntVector{0, 1});
    CHECK(fiber_connected_factorization({1, 1}).d == 1);
    CHECK(fiber_connected_factorization({4, 6}).d == 2);
    CHECK(fiber_connected_factorization({-4, 6}).reduced == IntVector{-2, 3});
    CHECK_THROWS_AS(fiber_connected_factorization({0, 0}), MomentError);
    CHECK(oracles::fiber_components(0, 2, 200, 0.123456) == 2);
}

TEST_CASE("fiber component count matches flood fill for |c| <= 6") {
    for (long a = -6; a <= 6; ++a)
        for (long b = -6; b <= 6; ++b) {
            if (a == 0 && b == 0) continue;
            auto f = fiber_connected_factorization({a, b});
            CHECK_MESSAGE(oracles::fiber_components(a, b, 200, 0.123456) == f.d.get_si(), "c = (" << a << ", " << b << ")");
            // The factorized map composed with t -> t^d recovers the original.
            const double x = 0.37, y = 0.81;
            const double reduced = f.reduced[0].get_d() * x + f.reduced[1].get_d() * y;
            CHECK(geom::circle_distance(f.d.get_d() * reduced, a * x + b * y) < 1e-12);
        }
}

TEST_CASE("local_weights") {
    ProductManifold s2 = spheres(1);
    ActionSpec a(s2, {{{}, {1}}});
    CHECK(local_weights(s2, a, {0.0, -1.0}).weights == std::vector<IntVector>{{1}});
    CHECK(local_weights(s2, a, {0.0, 1.0}).weights == std::vector<IntVector>{{-1}});
    CHECK(local_weights(s2, a.with_sign(SignConvention::Minus), {0.0, -1.0}).weights == std::vector<IntVector>{{-1}});
    CHECK_THROWS_AS(local_weights(s2, a, {0.0, 0.5}), MomentError);

    ProductManifold s2s2 = spheres(2);
    ActionSpec b(s2s2, {{{}, {1, 0}}, {{}, {0, 2}}});
    CHECK(local_weights(s2s2, b, {0.0, -1.0, 0.0, -1.0}).weights == std::vector<IntVector>{{1, 0}, {0, 2}});

    ProductManifold m = s2xt2();
    try {
        local_weights(m, ActionSpec(m, {{{0, 0}, {1}}, {{1, 0}, {0}}}), {0.0, 0.0, 0.0, -1.0});
        FAIL("expected NotAFixedPoint");
    } catch (const MomentError& e) {
        CHECK(e.kind() == MomentError::Kind::NotAFixedPoint);
    }
}

TEST_CASE("local_model_check: quadratic fit reproduces the weights") {
    for (auto sign : {SignConvention::Plus, SignConvention::Minus}) {
        ProductManifold s2s2(std::nullopt, {SphereFactor(Coefficient::exact(Rational(1))),
                                            SphereFactor(Coefficient::exact(Rational(5, 2)))});
        ActionSpec b(s2s2, {{{}, {1, 0}}, {{}, {0, 2}}}, sign);
        auto mu = build(s2s2, b);
        for (double h0 : {-1.0, 1.0})
            for (double h1 : {-1.0, 1.0}) {
                geom::Point p{0.0, h0, 0.0, h1};
                auto rep = local_model_check(mu, p, 0.1);
                CHECK(rep.max_residual < 1e-4);
                auto local = local_weights(s2s2, b, p);
                for (std::size_t i = 0; i < mu.c(); ++i)
                    for (std::size_t k = 0; k < 2; ++k) {
                        double paired = 0.0;
                        for (std::size_t j = 0; j < 2; ++j)
                            paired += local.weights[k][j].get_d() * mu.mu1[i].combination[j].get_d();
                        CHECK(rep.fitted_weights[i][k] == doctest::Approx(paired).epsilon(1e-6));
                    }
                CHECK(rep.minimum_weights_nonnegative);
                CHECK_FALSE(rep.circle_extremum);
            }
    }
    ProductManifold s2 = spheres(1);
    auto mu = build(s2, ActionSpec(s2, {{{}, {1}}}));
    auto south = local_model_check(mu, {0.0, -1.0}, 0.1);
    CHECK(south.minimizes == std::vector<bool>{true});
    CHECK(south.ok(1e-4));
    CHECK(local_model_check(mu, {0.0, 1.0}, 0.1).minimizes == std::vector<bool>{false});
}
