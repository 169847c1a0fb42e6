#include "doctest.h"

#include "momentforge/ratlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace momentforge::ratlin;

namespace {

// Leibniz-formula determinant; independent of the Bareiss code under test.
template <typename T>
T leibniz_det(const Matrix<T>& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    T total(0);
    do {
        T term(1);
        for (std::size_t i = 0; i < n; ++i) term = term * m(i, perm[i]);
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        if (inversions % 2)
            total -= term;
        else
            total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

// Rank as the size of the largest nonzero minor, by enumeration.
std::size_t brute_rank(const IntMatrix& m) {
    std::size_t best = 0;
    const std::size_t r = m.rows(), c = m.cols();
    for (std::size_t rmask = 1; rmask < (1u << r); ++rmask)
        for (std::size_t cmask = 1; cmask < (1u << c); ++cmask) {
            std::vector<std::size_t> rs, cs;
            for (std::size_t i = 0; i < r; ++i)
                if (rmask >> i & 1u) rs.push_back(i);
            for (std::size_t j = 0; j < c; ++j)
                if (cmask >> j & 1u) cs.push_back(j);
            if (rs.size() != cs.size() || rs.size() <= best) continue;
            IntMatrix sub(rs.size(), cs.size());
            for (std::size_t a = 0; a < rs.size(); ++a)
                for (std::size_t b = 0; b < cs.size(); ++b) sub(a, b) = m(rs[a], cs[b]);
            if (leibniz_det(sub) != 0) best = rs.size();
        }
    return best;
}

IntMatrix random_int_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
    std::uniform_int_distribution<long> dist(lo, hi);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(rng);
    return m;
}

Rational exhaustive_best(const Rational& x, long max_den) {
    Rational best;
    Rational best_err;
    bool have = false;
    for (long q = 1; q <= max_den; ++q) {
        Integer fl;
        Integer num = x.numerator() * q;
        mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), x.denominator().get_mpz_t());
        for (Integer p : {Integer(fl), Integer(fl + 1)}) {
            Rational cand(p, Integer(q));
            Rational err = abs(cand - x);
            if (!have || err < best_err || (err == best_err && cand.denominator() < best.denominator())) {
                best = cand;
                best_err = err;
                have = true;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("rational invariants") {
    Rational a(Integer(6), Integer(-4));
    CHECK(a.numerator() == -3);
    CHECK(a.denominator() == 2);
    CHECK((a + Rational(Integer(3), Integer(2))).is_zero());
    CHECK(Rational::parse("-14/10") == Rational(Integer(-7), Integer(5)));
    CHECK(Rational::from_double(0.75) == Rational(Integer(3), Integer(4)));
    CHECK_THROWS_AS(Rational(Integer(1), Integer(0)), std::domain_error);
    CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("rat_kernel_basis examples") {
    SUBCASE("one equation") {
        auto k = rat_kernel_basis(rat_matrix(1, 3, {1, 1, 0}));
        REQUIRE(k.size() == 2);
        CHECK(k[0] == RatVector{Rational(-1), Rational(1), Rational(0)});
        CHECK(k[1] == RatVector{Rational(0), Rational(0), Rational(1)});
    }
    SUBCASE("proportional") {
        auto k = rat_kernel_basis(rat_matrix(1, 2, {2, 4}));
        REQUIRE(k.size() == 1);
        // (2, -1) up to scale
        CHECK(k[0][0] * Rational(-1) == k[0][1] * Rational(2));
        CHECK_FALSE(k[0][0].is_zero());
    }
    SUBCASE("zero matrix gives the standard basis") {
        auto k = rat_kernel_basis(RatMatrix(2, 3));
        REQUIRE(k.size() == 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(k[i][j] == Rational(i == j ? 1 : 0));
    }
}

TEST_CASE("kernel of random 4x6 matrices: m x = 0 and dim = 6 - rank") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        IntMatrix m = random_int_matrix(rng, 4, 6, -3, 3);
        if (trial % 5 == 0)  // force dependent rows now and then
            for (std::size_t j = 0; j < 6; ++j) m(3, j) = m(0, j) * 2 - m(1, j);
        RatMatrix rm = to_rational(m);
        auto basis = rat_kernel_basis(rm);
        const std::size_t r = brute_rank(m);
        CHECK(basis.size() == 6 - r);
        CHECK(integer_rank(m) == r);
        for (const auto& x : basis) {
            auto y = rm * x;
            for (const auto& v : y) CHECK(v.is_zero());
        }
        // Independence: stacking the basis as rows has full rank.
        if (!basis.empty()) {
            RatMatrix b(basis.size(), 6);
            for (std::size_t i = 0; i < basis.size(); ++i)
                for (std::size_t j = 0; j < 6; ++j) b(i, j) = basis[i][j];
            CHECK(rank(b) == basis.size());
        }
    }
}

TEST_CASE("integer_rank examples") {
    CHECK(integer_rank(int_matrix(2, 2, {0, 1, -1, 0})) == 2);
    CHECK(integer_rank(IntMatrix(3, 2)) == 0);
    CHECK(integer_rank(int_matrix(2, 2, {1, 2, 2, 4})) == 1);
}

TEST_CASE("determinant agrees with Leibniz") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        IntMatrix m = random_int_matrix(rng, 4, 4, -5, 5);
        CHECK(determinant(m) == leibniz_det(m));
    }
    CHECK(determinant(int_matrix(2, 2, {2, 4, 6, 8})) == -8);
}

TEST_CASE("smith_normal_form examples") {
    SUBCASE("diag(2,3)") {
        auto s = smith_normal_form(int_matrix(2, 2, {2, 0, 0, 3}));
        CHECK(s.diagonal() == IntVector{1, 6});
    }
    SUBCASE("identity") {
        auto s = smith_normal_form(IntMatrix::identity(3));
        CHECK(s.d == IntMatrix::identity(3));
    }
    SUBCASE("[[2,4],[6,8]]") {
        // d1 = gcd of entries = 2, d1 d2 = |det| = 8
        auto s = smith_normal_form(int_matrix(2, 2, {2, 4, 6, 8}));
        CHECK(s.diagonal() == IntVector{2, 4});
    }
}

TEST_CASE("smith_normal_form properties on random matrices") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t r = 1 + trial % 4, c = 1 + (trial / 4) % 4;
        IntMatrix m = random_int_matrix(rng, r, c, -6, 6);
        auto s = smith_normal_form(m);
        CHECK(s.u * m * s.v == s.d);
        CHECK(abs(leibniz_det(s.u)) == 1);
        CHECK(abs(leibniz_det(s.v)) == 1);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (i != j) CHECK(s.d(i, j) == 0);
        auto d = s.diagonal();
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(d[i] >= 0);
            if (i + 1 < d.size() && d[i] != 0) CHECK(mpz_divisible_p(d[i + 1].get_mpz_t(), d[i].get_mpz_t()));
            if (d[i] == 0 && i + 1 < d.size()) CHECK(d[i + 1] == 0);
        }
        CHECK(s.rank == brute_rank(m));
        // d1 is the gcd of all entries.
        Integer g = content(m.data());
        CHECK(d[0] == g);
    }
}

TEST_CASE("hermite_normal_form and integer kernels") {
    IntMatrix h = hermite_normal_form(int_matrix(2, 3, {2, 4, 6, 1, 1, 1}));
    REQUIRE(h.rows() == 2);
    CHECK(h(0, 0) > 0);
    CHECK(h(1, 0) == 0);
    CHECK(h(1, 1) > 0);
    CHECK(h(0, 1) >= 0);
    CHECK(h(0, 1) < h(1, 1));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        IntMatrix m = random_int_matrix(rng, 2, 5, -4, 4);
        IntMatrix k = integer_kernel_basis(m);
        CHECK(k.rows() == 5 - brute_rank(m));
        for (std::size_t i = 0; i < k.rows(); ++i) {
            auto y = m * k.row(i);
            for (const auto& v : y) CHECK(v == 0);
        }
        // Saturated: the kernel basis has all elementary divisors 1.
        if (k.rows() > 0) {
            auto s = smith_normal_form(k);
            for (const auto& d : s.diagonal()) CHECK(d == 1);
        }
    }
}

TEST_CASE("unimodular_inverse") {
    IntMatrix m = int_matrix(3, 3, {1, 2, 3, 0, 1, 4, 0, 0, 1});
    CHECK(m * unimodular_inverse(m) == IntMatrix::identity(3));
    CHECK_THROWS(unimodular_inverse(int_matrix(2, 2, {2, 0, 0, 1})));
}

TEST_CASE("rational_round examples") {
    CHECK(rational_round(std::sqrt(2.0), Integer(5)) == Rational(Integer(7), Integer(5)));
    CHECK(rational_round(0.75, Integer(100)) == Rational(Integer(3), Integer(4)));
    CHECK(rational_round(std::numbers::pi, Integer(7)) == Rational(Integer(22), Integer(7)));
    CHECK(exhaustive_best(Rational::from_double(std::numbers::pi), 7) == Rational(Integer(22), Integer(7)));
    CHECK(rational_round(-std::sqrt(2.0), Integer(5)) == Rational(Integer(-7), Integer(5)));
    CHECK_THROWS(rational_round(1.0, Integer(0)));
}

TEST_CASE("rational_round is optimal against an exhaustive scan") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    const long dens[] = {1, 2, 7, 30, 113, 1000};
    for (int trial = 0; trial < 25; ++trial) {
        const double x = dist(rng);
        for (long d : dens) {
            Rational got = rational_round(x, Integer(d));
            CHECK(got.denominator() <= d);
            CHECK(got == exhaustive_best(Rational::from_double(x), d));
        }
    }
    // Ties go to the smaller denominator: 1/4 is equidistant from 0/1 and 1/2.
    CHECK(rational_round(0.25, Integer(2)) == Rational(0));
}

TEST_CASE("pfaffian") {
    const Rational a(Integer(5), Integer(3));
    CHECK(pfaffian(rat_matrix(2, 2, {0, a, -a, 0})) == a);
    RatMatrix std4 = rat_matrix(4, 4, {0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0});
    CHECK(pfaffian(std4) == Rational(1));
    CHECK_THROWS(pfaffian(rat_matrix(2, 2, {0, 1, 1, 0})));
    CHECK_THROWS(pfaffian(RatMatrix(3, 3)));

    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
    for (std::size_t n : {4u, 6u}) {
        for (int trial = 0; trial < 15; ++trial) {
            RatMatrix m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    m(i, j) = Rational(Integer(num(rng)), Integer(den(rng)));
                    m(j, i) = -m(i, j);
                }
            Rational pf = pfaffian(m);
            CHECK(pf * pf == leibniz_det(m));
            CHECK(pf * pf == determinant(m));
        }
    }
}
