#include "doctest.h"

#include "momentforge/geom.hpp"

#include <cmath>
#include <numbers>

using namespace momentforge;
using namespace momentforge::geom;

namespace {

std::vector<Coefficient> standard_omega(std::size_t n, const Rational& scale = Rational(1)) {
    std::vector<Coefficient> w(n * n, Coefficient::exact(Rational(0)));
    for (std::size_t p = 0; p < n / 2; ++p) {
        w[(2 * p) * n + 2 * p + 1] = Coefficient::exact(scale);
        w[(2 * p + 1) * n + 2 * p] = Coefficient::exact(-scale);
    }
    return w;
}

ProductManifold torus(std::size_t n) { return ProductManifold(FlatTorusFactor(n, standard_omega(n)), {}); }

ProductManifold sphere(const Rational& c = Rational(1)) {
    return ProductManifold(std::nullopt, {SphereFactor(Coefficient::exact(c))});
}

ProductManifold s2xt2() {
    return ProductManifold(FlatTorusFactor(2, standard_omega(2)), {SphereFactor(Coefficient::exact(Rational(1)))});
}

// Midpoint Riemann sum of omega(X, c'(t)) along a straight segment.
double riemann_oneform(const ProductManifold& m, const VectorField& x, const Point& a, const Point& b, int steps) {
    Tangent d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
    double s = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double t = (k + 0.5) / steps;
        Point c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + t * d[i];
        s += pairing_eval(m, x.at(m, c), d, c) / steps;
    }
    return s;
}

}  // namespace

TEST_CASE("construction invariants") {
    CHECK_THROWS_AS(FlatTorusFactor(2, std::vector<Coefficient>(4, Coefficient::exact(Rational(0)))), GeometryError);
    CHECK_THROWS_AS(FlatTorusFactor(3, standard_omega(3)), GeometryError);
    std::vector<Coefficient> asym = standard_omega(2);
    asym[2] = Coefficient::exact(Rational(2));
    CHECK_THROWS_AS(FlatTorusFactor(2, asym), GeometryError);
    CHECK_THROWS_AS(SphereFactor(Coefficient::exact(Rational(0))), GeometryError);
    // Omega = dx1^dx2 + dx1^dx3 ... with Pfaffian 0 on T^4.
    std::vector<Coefficient> deg(16, Coefficient::exact(Rational(0)));
    auto set = [&](std::size_t i, std::size_t j, long v) {
        deg[i * 4 + j] = Coefficient::exact(Rational(v));
        deg[j * 4 + i] = Coefficient::exact(Rational(-v));
    };
    set(0, 1, 1);
    set(0, 2, 1);
    set(1, 2, 1);
    CHECK_THROWS_AS(FlatTorusFactor(4, deg), GeometryError);

    ProductManifold m = s2xt2();
    CHECK(m.dimension() == 4);
    CHECK(m.b1() == 2);
    CHECK(m.is_exact());
    CHECK(Coefficient::parse("1.5").is_exact() == false);
    CHECK(Coefficient::parse("3/2").rational() == Rational(Integer(3), Integer(2)));
}

TEST_CASE("fundamental_field") {
    ProductManifold t2 = torus(2);
    ActionSpec plus(t2, {{{1, 0}, {}}, {{0, 1}, {}}}, SignConvention::Plus);
    Point x{0.3, 0.4};
    CHECK(fundamental_field(t2, plus, 0).at(t2, x) == Tangent{1.0, 0.0});
    CHECK(fundamental_field(t2, plus.with_sign(SignConvention::Minus), 0).at(t2, x) == Tangent{-1.0, 0.0});
    CHECK_THROWS_AS(fundamental_field(t2, plus, 2), std::out_of_range);

    ProductManifold s2 = sphere();
    ActionSpec rot(s2, {{{}, {2}}});
    CHECK(fundamental_field(s2, rot, 0).at(s2, Point{0.1, 0.2}) == Tangent{2.0, 0.0});
}

TEST_CASE("pairing_eval") {
    ProductManifold t2 = torus(2);
    CHECK(pairing_eval(t2, {1, 0}, {0, 1}, {0, 0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pairing_eval(t2, {1, 0, 0}, {0, 1}, {0, 0}), std::invalid_argument);

    ProductManifold s2 = sphere();
    CHECK(pairing_eval(s2, {1, 0}, {0, 1}, {0.0, 0.0}) == doctest::Approx(1.0));

    ProductManifold m = s2xt2();
    for (const auto& p : sample_points(m, 50, 9)) {
        for (const auto& u : sample_points(m, 5, 10)) CHECK(pairing_eval(m, u, u, p) == 0.0);
    }
}

TEST_CASE("integrate_oneform_over_loop") {
    ProductManifold t2 = torus(2);
    ActionSpec a(t2, {{{1, 0}, {}}});
    VectorField x = fundamental_field(t2, a, 0);

    SUBCASE("closed form against a 10^4-step Riemann sum") {
        Loop l = Loop::torus({0.0, 0.0}, {0, 1});
        const double closed = integrate_oneform_over_loop(t2, x, l);
        const double oracle = riemann_oneform(t2, x, {0.0, 0.0}, {0.0, 1.0}, 10000);
        CHECK(closed == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(closed - oracle) < 1e-9);
        CHECK(exact_loop_period(t2, x, l) == Rational(1));
    }
    SUBCASE("loop along the field") {
        CHECK(integrate_oneform_over_loop(t2, x, Loop::torus({0.2, 0.7}, {1, 0})) == 0.0);
    }
    SUBCASE("latitude loop on a sphere") {
        ProductManifold s2 = sphere();
        ActionSpec r(s2, {{{}, {1}}});
        CHECK(std::abs(integrate_oneform_over_loop(s2, fundamental_field(s2, r, 0), Loop::latitude(0, 0.3))) < 1e-12);
    }
    SUBCASE("open curve rejected") {
        Path p{{{0.0, 0.0}, {0.0, 0.5}}};
        CHECK_THROWS_AS(require_closed(t2, p), GeometryError);
    }
}

TEST_CASE("one-form integrals: additivity, reversal, quadrature agreement") {
    ProductManifold m(FlatTorusFactor(4, standard_omega(4)), {SphereFactor(Coefficient::exact(Rational(3, 2)))});
    ActionSpec a(m, {{{1, 0, 2, 0}, {1}}, {{0, -1, 0, 3}, {2}}});
    for (std::size_t j = 0; j < a.size(); ++j) {
        VectorField x = fundamental_field(m, a, j);
        for (const auto& p : sample_points(m, 20, 31 + j)) {
            Point q = p, r = p;
            q[0] += 0.7;
            q[3] -= 1.2;
            q[m.height_index(0)] = 0.1;
            r[1] += 2.0;
            r[m.theta_index(0)] += 0.4;
            r[m.height_index(0)] = -0.5;
            const double pq = integrate_oneform_along_path(m, x, Path{{p, q}});
            const double qr = integrate_oneform_along_path(m, x, Path{{q, r}});
            const double pqr = integrate_oneform_along_path(m, x, Path{{p, q, r}});
            CHECK(std::abs(pqr - (pq + qr)) < 1e-12);
            CHECK(std::abs(integrate_oneform_along_path(m, x, Path{{q, p}}) + pq) < 1e-12);
            CHECK(std::abs(quadrature_oneform_along_path(m, x, Path{{p, q, r}}) - pqr) < 1e-9);
        }
        for (const auto& loop : homology_bases(m).loops) {
            Point rest(m.dimension(), 0.0);
            const double closed = integrate_oneform_over_loop(m, x, loop);
            const double quad = quadrature_oneform_along_path(m, x, loop.as_path(m, rest));
            CHECK(std::abs(closed - quad) < 1e-9);
            CHECK(closed == doctest::Approx(exact_loop_period(m, x, loop).to_double()));
        }
    }
}

TEST_CASE("integrate_twoform_over_cycle") {
    ProductManifold t4 = torus(4);
    TwoCycle t12{TwoCycle::Kind::TorusPlane, 0, 1, 0};
    TwoCycle t13{TwoCycle::Kind::TorusPlane, 0, 2, 0};
    CHECK(integrate_twoform_over_cycle(t4, t12).rational() == Rational(1));
    CHECK(integrate_twoform_over_cycle(t4, t13).rational() == Rational(0));

    // c = 3/2: closed form 3 against a midpoint quadrature of c over [0,1] x [-1,1].
    ProductManifold s2 = sphere(Rational(3, 2));
    TwoCycle s{TwoCycle::Kind::Sphere, 0, 1, 0};
    Coefficient period = integrate_twoform_over_cycle(s2, s);
    CHECK(period.rational() == Rational(3));
    double quad = 0.0;
    const int n = 200;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Point x{(i + 0.5) / n, -1.0 + 2.0 * (j + 0.5) / n};
            quad += pairing_eval(s2, {1.0, 0.0}, {0.0, 1.0}, x) * (1.0 / n) * (2.0 / n);
        }
    CHECK(std::abs(quad - period.value()) < 1e-9);
}

TEST_CASE("homology_bases") {
    auto b4 = homology_bases(torus(4));
    CHECK(b4.loops.size() == 4);
    CHECK(b4.cycles.size() == 6);
    auto b = homology_bases(s2xt2());
    CHECK(b.loops.size() == 2);
    CHECK(b.cycles.size() == 2);
    auto bs = homology_bases(sphere());
    CHECK(bs.loops.empty());
    CHECK(bs.cycles.size() == 1);
}

TEST_CASE("fixed_point_set") {
    ProductManifold t2 = torus(2);
    CHECK(fixed_point_set(t2, ActionSpec(t2, {{{1, 0}, {}}})).empty);

    ProductManifold s2s2(std::nullopt, {SphereFactor(Coefficient::exact(Rational(1))),
                                        SphereFactor(Coefficient::exact(Rational(1)))});
    ActionSpec rot(s2s2, {{{}, {1, 0}}, {{}, {0, 1}}});
    FixedPointSet fp = fixed_point_set(s2s2, rot);
    CHECK_FALSE(fp.empty);
    CHECK(fp.finite());
    CHECK(fp.count() == 4);
    auto reps = fp.representatives(s2s2);
    CHECK(reps.size() == 4);
    for (const auto& p : reps)
        for (std::size_t j = 0; j < rot.size(); ++j) CHECK(field_norm(s2s2, fundamental_field(s2s2, rot, j), p) == 0.0);

    ProductManifold m = s2xt2();
    CHECK(fixed_point_set(m, ActionSpec(m, {{{0, 0}, {1}}, {{1, 0}, {0}}})).empty);

    // Rotation only: torus x poles, infinite.
    FixedPointSet inf = fixed_point_set(m, ActionSpec(m, {{{0, 0}, {1}}}));
    CHECK_FALSE(inf.empty);
    CHECK_FALSE(inf.finite());
    for (const auto& p : inf.representatives(m)) CHECK(field_norm(m, fundamental_field(m, ActionSpec(m, {{{0, 0}, {1}}}), 0), p) == 0.0);
}

TEST_CASE("sample_points") {
    ProductManifold t2 = torus(2);
    auto a = sample_points(t2, 4, 0);
    auto b = sample_points(t2, 4, 0);
    CHECK(a == b);
    CHECK(a[0] != a[1]);
    CHECK(a != sample_points(t2, 4, 1));

    auto s = sample_points(sphere(), 1000, 1);
    int north = 0;
    for (const auto& p : s) {
        CHECK(p[1] >= -1.0);
        CHECK(p[1] <= 1.0);
        if (p[1] > 0) ++north;
    }
    CHECK(std::abs(north - 500) <= 25);
}

TEST_CASE("the action is a group action and effectiveness is reported") {
    ProductManifold m = s2xt2();
    ActionSpec a(m, {{{0, 0}, {1}}, {{1, 0}, {0}}});
    CHECK(a.effective());
    auto x = sample_points(m, 1, 4)[0];
    std::vector<double> s{0.3, 0.9}, t{0.45, 0.2}, st{0.75, 1.1};
    Point lhs = act(m, a, s, act(m, a, t, x));
    Point rhs = act(m, a, st, x);
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(circle_distance(lhs[i], rhs[i]) < 1e-12);

    ActionSpec doubled(m, {{{2, 0}, {0}}});
    CHECK_FALSE(doubled.effective());
    CHECK_THROWS_AS(ActionSpec(m, {{{0, 0}, {0}}}), GeometryError);
}

TEST_CASE("darboux_chart pulls omega back to the standard form") {
    ProductManifold m(FlatTorusFactor(2, {Coefficient::exact(Rational(0)), Coefficient::exact(Rational(3)),
                                           Coefficient::exact(Rational(-3)), Coefficient::exact(Rational(0))}),
                      {SphereFactor(Coefficient::exact(Rational(1, 2)))});
    for (double pole : {-1.0, 1.0, 0.2}) {
        Point center{0.1, 0.2, 0.0, pole};
        std::vector<double> base{0.01, 0.02, 0.03, 0.05};
        const double eps = 1e-6;
        for (std::size_t plane = 0; plane < 2; ++plane) {
            auto dchart = [&](std::size_t k) {
                std::vector<double> lo = base, hi = base;
                lo[k] -= eps;
                hi[k] += eps;
                Point a = darboux_chart(m, center, lo), b = darboux_chart(m, center, hi);
                Tangent d(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) {
                    double diff = b[i] - a[i];
                    if (i == m.theta_index(0)) diff -= std::round(diff);
                    d[i] = diff / (2 * eps);
                }
                return d;
            };
            Tangent u = dchart(2 * plane), w = dchart(2 * plane + 1);
            Point at = darboux_chart(m, center, base);
            CHECK(pairing_eval(m, u, w, at) == doctest::Approx(1.0).epsilon(1e-5));
        }
    }
}
