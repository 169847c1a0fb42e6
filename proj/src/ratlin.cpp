#include "momentforge/ratlin.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

namespace momentforge::ratlin {

// ---------------------------------------------------------------------------
// Rational

Rational::Rational(const Integer& num, const Integer& den) {
    if (sgn(den) == 0) throw std::domain_error("rational: zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational Rational::from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational: non-finite double");
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), x);
    return Rational(std::move(q));
}

Rational Rational::parse(std::string_view text) {
    std::string s(text);
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s, 10));
        return Rational(Integer(s.substr(0, slash), 10), Integer(s.substr(slash + 1), 10));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("rational: cannot parse '" + s + "'");
    }
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }
Rational& Rational::operator+=(const Rational& o) {
    value_ += o.value_;
    return *this;
}
Rational& Rational::operator-=(const Rational& o) {
    value_ -= o.value_;
    return *this;
}
Rational& Rational::operator*=(const Rational& o) {
    value_ *= o.value_;
    return *this;
}
Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational: division by zero");
    value_ /= o.value_;
    return *this;
}

Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }

std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.str(); }

// ---------------------------------------------------------------------------
// Helpers

RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

IntMatrix int_matrix(std::size_t rows, std::size_t cols, const std::vector<long>& entries) {
    std::vector<Integer> data(entries.begin(), entries.end());
    return IntMatrix(rows, cols, std::move(data));
}

RatMatrix rat_matrix(std::size_t rows, std::size_t cols, const std::vector<Rational>& entries) {
    return RatMatrix(rows, cols, entries);
}

Integer lcm_of_denominators(const RatVector& v) {
    Integer l = 1;
    for (const auto& x : v) {
        Integer d = x.denominator();
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    }
    return l;
}

Integer content(const IntVector& v) {
    Integer g = 0;
    for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    return g;
}

IntVector primitive_integer_vector(const RatVector& v) {
    Integer l = lcm_of_denominators(v);
    IntVector out;
    out.reserve(v.size());
    for (const auto& x : v) {
        Rational scaled = x * Rational(l);
        out.push_back(scaled.numerator());
    }
    Integer g = content(out);
    if (g > 1)
        for (auto& x : out) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    return out;
}

namespace {

// Each row scaled by the lcm of its denominators.
IntMatrix clear_row_denominators(const RatMatrix& m, IntVector* scales = nullptr) {
    IntMatrix out(m.rows(), m.cols());
    if (scales) scales->assign(m.rows(), Integer(1));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Integer l = lcm_of_denominators(m.row(i));
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = (m(i, j) * Rational(l)).numerator();
        if (scales) (*scales)[i] = l;
    }
    return out;
}

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

// row_dst += f * row_src
void add_row_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const Integer& f) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += f * m(src, j);
}

void add_col_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const Integer& f) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += f * m(i, src);
}

void negate_row(IntMatrix& m, std::size_t r) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = -m(r, j);
}

void divexact_checked(Integer& x, const Integer& d) {
    Integer r;
    mpz_tdiv_r(r.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
    if (sgn(r) != 0) throw std::logic_error("bareiss: inexact division");
    mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
}

// Fraction-free forward elimination; returns rank and the pivot columns.
std::size_t bareiss_echelon(IntMatrix& m, std::vector<std::size_t>* pivots, int* sign) {
    std::size_t r = 0;
    Integer prev = 1;
    for (std::size_t j = 0; j < m.cols() && r < m.rows(); ++j) {
        std::size_t p = r;
        while (p < m.rows() && sgn(m(p, j)) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != r) {
            swap_rows(m, p, r);
            if (sign) *sign = -*sign;
        }
        for (std::size_t i = r + 1; i < m.rows(); ++i) {
            for (std::size_t c = j + 1; c < m.cols(); ++c) {
                m(i, c) = m(i, c) * m(r, j) - m(i, j) * m(r, c);
                divexact_checked(m(i, c), prev);
            }
            m(i, j) = 0;
        }
        prev = m(r, j);
        if (pivots) pivots->push_back(j);
        ++r;
    }
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Echelon forms, kernels, rank

EchelonForm reduced_row_echelon(const RatMatrix& m) {
    IntMatrix a = clear_row_denominators(m);
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t j = 0; j < a.cols() && r < a.rows(); ++j) {
        std::size_t p = r;
        while (p < a.rows() && sgn(a(p, j)) == 0) ++p;
        if (p == a.rows()) continue;
        swap_rows(a, p, r);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r || sgn(a(i, j)) == 0) continue;
            Integer f = a(i, j);
            Integer piv = a(r, j);
            for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) = piv * a(i, c) - f * a(r, c);
            Integer g = content(a.row(i));
            if (g > 1)
                for (std::size_t c = 0; c < a.cols(); ++c)
                    mpz_divexact(a(i, c).get_mpz_t(), a(i, c).get_mpz_t(), g.get_mpz_t());
        }
        pivots.push_back(j);
        ++r;
    }
    RatMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < r; ++i) {
        Integer piv = a(i, pivots[i]);
        for (std::size_t c = 0; c < a.cols(); ++c) out(i, c) = Rational(a(i, c), piv);
    }
    return {std::move(out), std::move(pivots)};
}

std::vector<RatVector> rat_kernel_basis(const RatMatrix& m) {
    EchelonForm e = reduced_row_echelon(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<RatVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        RatVector x(m.cols(), Rational(0));
        x[f] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = -e.rref(i, f);
        basis.push_back(std::move(x));
    }
    return basis;
}

std::size_t integer_rank(const IntMatrix& m) {
    IntMatrix a = m;
    return bareiss_echelon(a, nullptr, nullptr);
}

std::size_t rank(const RatMatrix& m) { return integer_rank(clear_row_denominators(m)); }

Integer determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
    if (m.rows() == 0) return 1;
    IntMatrix a = m;
    int sign = 1;
    std::size_t r = bareiss_echelon(a, nullptr, &sign);
    if (r < a.rows()) return 0;
    return sign * a(a.rows() - 1, a.cols() - 1);
}

Rational determinant(const RatMatrix& m) {
    IntVector scales;
    IntMatrix a = clear_row_denominators(m, &scales);
    Rational d(determinant(a));
    for (const auto& s : scales) d /= Rational(s);
    return d;
}

// ---------------------------------------------------------------------------
// Smith and Hermite normal forms

IntVector SmithForm::diagonal() const {
    IntVector out;
    for (std::size_t i = 0; i < std::min(d.rows(), d.cols()); ++i) out.push_back(d(i, i));
    return out;
}

SmithForm smith_normal_form(const IntMatrix& m) {
    IntMatrix a = m;
    IntMatrix u = IntMatrix::identity(m.rows());
    IntMatrix v = IntMatrix::identity(m.cols());
    const std::size_t n = std::min(m.rows(), m.cols());
    std::size_t t = 0;
    for (; t < n; ++t) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        bool found = false;
        std::size_t pi = t, pj = t;
        Integer best;
        for (std::size_t i = t; i < a.rows(); ++i)
            for (std::size_t j = t; j < a.cols(); ++j) {
                if (sgn(a(i, j)) == 0) continue;
                Integer mag = ::abs(a(i, j));
                if (!found || mag < best) {
                    found = true;
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        if (!found) break;
        swap_rows(a, t, pi);
        swap_rows(u, t, pi);
        swap_cols(a, t, pj);
        swap_cols(v, t, pj);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < a.rows(); ++i) {
                if (sgn(a(i, t)) == 0) continue;
                Integer q;
                mpz_tdiv_q(q.get_mpz_t(), a(i, t).get_mpz_t(), a(t, t).get_mpz_t());
                add_row_multiple(a, i, t, -q);
                add_row_multiple(u, i, t, -q);
                if (sgn(a(i, t)) != 0) {
                    swap_rows(a, t, i);
                    swap_rows(u, t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < a.cols(); ++j) {
                if (sgn(a(t, j)) == 0) continue;
                Integer q;
                mpz_tdiv_q(q.get_mpz_t(), a(t, j).get_mpz_t(), a(t, t).get_mpz_t());
                add_col_multiple(a, j, t, -q);
                add_col_multiple(v, j, t, -q);
                if (sgn(a(t, j)) != 0) {
                    swap_cols(a, t, j);
                    swap_cols(v, t, j);
                    clean = false;
                }
            }
            if (!clean) continue;
            // Divisibility of the trailing block by the pivot.
            bool divides = true;
            for (std::size_t i = t + 1; i < a.rows() && divides; ++i)
                for (std::size_t j = t + 1; j < a.cols(); ++j) {
                    if (!mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
                        add_row_multiple(a, t, i, Integer(1));
                        add_row_multiple(u, t, i, Integer(1));
                        divides = false;
                        break;
                    }
                }
            if (divides) break;
        }
        if (sgn(a(t, t)) < 0) {
            negate_row(a, t);
            negate_row(u, t);
        }
    }
    return {std::move(u), std::move(a), std::move(v), t};
}

ExtendedGcd extended_gcd(const Integer& a, const Integer& b) {
    ExtendedGcd r;
    mpz_gcdext(r.g.get_mpz_t(), r.x.get_mpz_t(), r.y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

IntMatrix hermite_normal_form(const IntMatrix& m) {
    IntMatrix h = m;
    std::size_t r = 0;
    for (std::size_t j = 0; j < h.cols() && r < h.rows(); ++j) {
        std::size_t p = r;
        while (p < h.rows() && sgn(h(p, j)) == 0) ++p;
        if (p == h.rows()) continue;
        swap_rows(h, r, p);
        for (std::size_t i = r + 1; i < h.rows(); ++i) {
            if (sgn(h(i, j)) == 0) continue;
            Integer a = h(r, j), b = h(i, j);
            ExtendedGcd e = extended_gcd(a, b);
            Integer ag = a / e.g, bg = b / e.g;
            for (std::size_t c = 0; c < h.cols(); ++c) {
                Integer top = e.x * h(r, c) + e.y * h(i, c);
                Integer bottom = ag * h(i, c) - bg * h(r, c);
                h(r, c) = std::move(top);
                h(i, c) = std::move(bottom);
            }
        }
        if (sgn(h(r, j)) < 0) negate_row(h, r);
        for (std::size_t k = 0; k < r; ++k) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), h(k, j).get_mpz_t(), h(r, j).get_mpz_t());
            if (sgn(q) != 0) add_row_multiple(h, k, r, -q);
        }
        ++r;
    }
    IntMatrix out(r, h.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t c = 0; c < h.cols(); ++c) out(i, c) = h(i, c);
    return out;
}

IntMatrix integer_kernel_basis(const IntMatrix& m) {
    SmithForm s = smith_normal_form(m);
    const std::size_t n = m.cols();
    IntMatrix k(n - s.rank, n);
    for (std::size_t b = s.rank; b < n; ++b)
        for (std::size_t i = 0; i < n; ++i) k(b - s.rank, i) = s.v(i, b);
    if (k.rows() == 0) return k;
    return hermite_normal_form(k);
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("unimodular_inverse: matrix not square");
    RatMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = Rational(m(i, j));
        aug(i, n + i) = 1;
    }
    EchelonForm e = reduced_row_echelon(aug);
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1)
        throw std::invalid_argument("unimodular_inverse: singular matrix");
    IntMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& x = e.rref(i, n + j);
            if (!x.is_integer()) throw std::invalid_argument("unimodular_inverse: matrix not unimodular");
            inv(i, j) = x.numerator();
        }
    return inv;
}

// ---------------------------------------------------------------------------
// Rational approximation

Rational rational_round(const Rational& x, const Integer& max_denominator) {
    if (max_denominator < 1) throw std::invalid_argument("rational_round: max_denominator < 1");
    if (x.denominator() <= max_denominator) return x;
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Integer n = x.numerator(), d = x.denominator();
    for (;;) {
        Integer a;
        mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        Integer q2 = q0 + a * q1;
        if (q2 > max_denominator) break;
        Integer p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Integer rem = n - a * d;
        n = d;
        d = rem;
    }
    // Best semiconvergent against the last convergent.
    Integer k;
    mpz_fdiv_q(k.get_mpz_t(), Integer(max_denominator - q0).get_mpz_t(), q1.get_mpz_t());
    Rational semi(p0 + k * p1, q0 + k * q1);
    Rational conv(p1, q1);
    Rational e_semi = abs(semi - x);
    Rational e_conv = abs(conv - x);
    if (e_conv < e_semi) return conv;
    if (e_semi < e_conv) return semi;
    return conv.denominator() <= semi.denominator() ? conv : semi;
}

Rational rational_round(double x, const Integer& max_denominator) {
    return rational_round(Rational::from_double(x), max_denominator);
}

// ---------------------------------------------------------------------------
// Pfaffian

namespace {

template <typename T>
T pfaffian_recursive(const Matrix<T>& m, std::vector<std::size_t>& idx) {
    if (idx.empty()) return T(1);
    const std::size_t first = idx.front();
    T total(0);
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const std::size_t j = idx[k];
        if (m(first, j) == T(0)) continue;
        std::vector<std::size_t> rest;
        rest.reserve(idx.size() - 2);
        for (std::size_t t = 1; t < idx.size(); ++t)
            if (t != k) rest.push_back(idx[t]);
        T sub = pfaffian_recursive(m, rest);
        T term = m(first, j) * sub;
        if (k % 2 == 1)
            total += term;
        else
            total -= term;
    }
    return total;
}

template <typename T>
void require_antisymmetric(const Matrix<T>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("pfaffian: matrix not square");
    if (m.rows() % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!(m(i, j) == -m(j, i))) throw std::invalid_argument("pfaffian: matrix not antisymmetric");
}

}  // namespace

Rational pfaffian(const RatMatrix& m) {
    require_antisymmetric(m);
    std::vector<std::size_t> idx(m.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return pfaffian_recursive(m, idx);
}

double pfaffian(const Matrix<double>& m) {
    require_antisymmetric(m);
    std::vector<std::size_t> idx(m.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return pfaffian_recursive(m, idx);
}

}  // namespace momentforge::ratlin
