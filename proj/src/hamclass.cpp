#include "momentforge/hamclass.hpp"

#include <algorithm>
#include <cmath>

namespace momentforge::hamclass {

namespace {

using geom::Coefficient;

Integer to_integer(std::int64_t x) { return Integer(static_cast<long>(x)); }

// Integer vectors spanning the rational row kernel of a real matrix.
IntMatrix real_row_kernel(const RealMatrix& p) {
    const std::size_t n = p.rows(), m = p.cols();
    RealMatrix a = p.transpose();  // m x n, columns indexed by generators
    double scale = 1.0;
    for (double x : a.data()) scale = std::max(scale, std::abs(x));
    const double tol = kRealRankTolerance * scale;
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t best = row;
        for (std::size_t i = row + 1; i < m; ++i)
            if (std::abs(a(i, col)) > std::abs(a(best, col))) best = i;
        if (std::abs(a(best, col)) <= tol) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(row, j), a(best, j));
        const double piv = a(row, col);
        for (std::size_t j = 0; j < n; ++j) a(row, j) /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || a(i, col) == 0.0) continue;
            const double f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<IntVector> rows;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        RatVector x(n, Rational(0));
        x[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = ratlin::rational_round(-a(i, f), Integer(1000000));
        rows.push_back(ratlin::primitive_integer_vector(x));
    }
    IntMatrix k(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) k(i, j) = rows[i][j];
    return k;
}

IntMatrix exact_row_kernel(const RatMatrix& p) {
    const auto basis = ratlin::rat_kernel_basis(p.transpose());
    IntMatrix k(basis.size(), p.rows());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        IntVector v = ratlin::primitive_integer_vector(basis[i]);
        for (std::size_t j = 0; j < v.size(); ++j) k(i, j) = v[j];
    }
    return k;
}

// Reduces each row of `rows` against the Hermite basis `h` (pivot-wise floor division).
void size_reduce(IntMatrix& rows, const IntMatrix& h) {
    for (std::size_t i = 0; i < rows.rows(); ++i)
        for (std::size_t b = 0; b < h.rows(); ++b) {
            std::size_t piv = 0;
            while (piv < h.cols() && sgn(h(b, piv)) == 0) ++piv;
            if (piv == h.cols()) continue;
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), rows(i, piv).get_mpz_t(), h(b, piv).get_mpz_t());
            if (sgn(q) == 0) continue;
            for (std::size_t j = 0; j < rows.cols(); ++j) rows(i, j) -= q * h(b, j);
        }
}

}  // namespace

PeriodMatrix period_matrix(const ProductManifold& m, const ActionSpec& a) {
    const std::size_t n = a.size(), b1 = m.torus_dim();
    const int eps = geom::sign_factor(a.sign());
    PeriodMatrix p;
    p.values = RealMatrix(n, b1);
    p.exact = m.torus() ? m.torus()->is_exact() : true;
    if (p.exact) p.exact_values = RatMatrix(n, b1);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = a.generator(j).translation;
        for (std::size_t k = 0; k < b1; ++k) {
            double s = 0.0;
            Rational q(0);
            for (std::size_t i = 0; i < b1; ++i) {
                if (v[i] == 0) continue;
                const Coefficient& w = m.torus()->omega(i, k);
                s += static_cast<double>(v[i]) * w.value();
                if (p.exact) q += Rational(to_integer(v[i])) * w.rational();
            }
            p.values(j, k) = eps * s;
            if (p.exact) p.exact_values(j, k) = Rational(eps) * q;
        }
    }
    return p;
}

PeriodMatrix combination_periods(const PeriodMatrix& p, const IntMatrix& coefficients) {
    if (coefficients.cols() != p.rows()) throw std::invalid_argument("combination_periods: dimension mismatch");
    PeriodMatrix out;
    out.exact = p.exact;
    out.values = RealMatrix(coefficients.rows(), p.cols());
    if (p.exact) out.exact_values = RatMatrix(coefficients.rows(), p.cols());
    for (std::size_t i = 0; i < coefficients.rows(); ++i)
        for (std::size_t k = 0; k < p.cols(); ++k) {
            double s = 0.0;
            Rational q(0);
            for (std::size_t j = 0; j < p.rows(); ++j) {
                if (sgn(coefficients(i, j)) == 0) continue;
                s += coefficients(i, j).get_d() * p.values(j, k);
                if (p.exact) q += Rational(coefficients(i, j)) * p.exact_values(j, k);
            }
            out.values(i, k) = s;
            if (p.exact) out.exact_values(i, k) = q;
        }
    return out;
}

IntMatrix saturate(const IntMatrix& rows, std::size_t n) {
    if (rows.rows() == 0) return IntMatrix(0, n);
    IntMatrix dual = ratlin::integer_kernel_basis(rows);
    IntMatrix sat = ratlin::integer_kernel_basis(dual);
    if (sat.rows() == 0) return IntMatrix(0, n);
    return sat;
}

ActionClassification classify_action(const PeriodMatrix& p) {
    const std::size_t n = p.rows();
    ActionClassification cls;
    IntMatrix kernel = p.cols() == 0 ? IntMatrix::identity(n)
                       : p.exact     ? exact_row_kernel(p.exact_values)
                                     : real_row_kernel(p.values);
    cls.hamiltonian = saturate(kernel, n);
    cls.c = cls.hamiltonian.rows();
    cls.r = n - cls.c;
    if (cls.c == 0) {
        cls.complement = IntMatrix::identity(n);
        return cls;
    }
    // The Hamiltonian lattice is saturated, so its Smith form is [I 0] and the
    // trailing rows of V^-1 complete it to a unimodular basis.
    ratlin::SmithForm s = ratlin::smith_normal_form(cls.hamiltonian);
    IntMatrix w = ratlin::unimodular_inverse(s.v);
    IntMatrix comp(cls.r, n);
    for (std::size_t i = 0; i < cls.r; ++i)
        for (std::size_t j = 0; j < n; ++j) comp(i, j) = w(cls.c + i, j);
    if (cls.r > 0) {
        comp = ratlin::hermite_normal_form(comp);
        size_reduce(comp, cls.hamiltonian);
    }
    cls.complement = comp;
    return cls;
}

std::vector<TwoCycle> form_basis(const ProductManifold& m) { return geom::homology_bases(m).cycles; }

std::vector<Coefficient> form_coefficients(const ProductManifold& m) {
    std::vector<Coefficient> out;
    for (const auto& s : form_basis(m)) out.push_back(geom::integrate_twoform_over_cycle(m, s));
    return out;
}

ProductManifold with_form(const ProductManifold& m, const RatVector& q) {
    const auto basis = form_basis(m);
    if (q.size() != basis.size()) throw std::invalid_argument("with_form: coefficient count mismatch");
    const std::size_t n = m.torus_dim();
    std::vector<Coefficient> omega(n * n, Coefficient::exact(Rational(0)));
    std::vector<geom::SphereFactor> spheres;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& s = basis[k];
        if (s.kind == TwoCycle::Kind::TorusPlane) {
            omega[s.i * n + s.j] = Coefficient::exact(q[k]);
            omega[s.j * n + s.i] = Coefficient::exact(-q[k]);
        } else {
            spheres.emplace_back(Coefficient::exact(q[k] / Rational(2)));
        }
    }
    std::optional<geom::FlatTorusFactor> torus;
    if (n > 0) torus.emplace(n, std::move(omega));
    return ProductManifold(std::move(torus), std::move(spheres));
}

IntMatrix exactness_constraints(const ProductManifold& m, const ActionSpec& a, const ActionClassification& cls) {
    const auto basis = form_basis(m);
    const std::size_t b1 = m.torus_dim();
    const int eps = geom::sign_factor(a.sign());
    IntMatrix out(b1 * cls.c, basis.size());
    for (std::size_t g = 0; g < cls.c; ++g) {
        IntVector w(b1, Integer(0));
        for (std::size_t j = 0; j < a.size(); ++j)
            for (std::size_t i = 0; i < b1; ++i)
                w[i] += cls.hamiltonian(g, j) * to_integer(a.generator(j).translation[i]);
        for (std::size_t loop = 0; loop < b1; ++loop)
            for (std::size_t k = 0; k < basis.size(); ++k) {
                const auto& s = basis[k];
                if (s.kind != TwoCycle::Kind::TorusPlane) continue;
                // i_X (dx_i ^ dx_j) = X_i dx_j - X_j dx_i
                Integer e(0);
                if (s.j == loop) e += w[s.i];
                if (s.i == loop) e -= w[s.j];
                out(g * b1 + loop, k) = eps * e;
            }
    }
    return out;
}

IntegralizationResult integralize_once(const ProductManifold& m, const ActionSpec& a, const Integer& max_denominator) {
    const auto coeffs = form_coefficients(m);
    const std::size_t nb = coeffs.size();
    const ActionClassification before = classify_action(period_matrix(m, a));
    const IntMatrix constraints = exactness_constraints(m, a, before);

    std::vector<RatVector> kernel;
    std::vector<std::size_t> free_cols;
    {
        RatMatrix c = ratlin::to_rational(constraints);
        if (c.rows() == 0) c = RatMatrix(1, nb);
        kernel = ratlin::rat_kernel_basis(c);
        const auto e = ratlin::reduced_row_echelon(c);
        std::vector<bool> is_pivot(nb, false);
        for (auto p : e.pivots) is_pivot[p] = true;
        for (std::size_t f = 0; f < nb; ++f)
            if (!is_pivot[f]) free_cols.push_back(f);
    }

    RatVector q(nb, Rational(0));
    for (std::size_t b = 0; b < kernel.size(); ++b) {
        const Coefficient& x = coeffs[free_cols[b]];
        const Rational t = x.is_exact() ? x.rational() : ratlin::rational_round(x.value(), max_denominator);
        for (std::size_t k = 0; k < nb; ++k) q[k] += t * kernel[b][k];
    }

    // Nondegeneracy before building the manifold, which would reject it.
    const auto basis = form_basis(m);
    const std::size_t n = m.torus_dim();
    if (n > 0) {
        RatMatrix om(n, n);
        for (std::size_t k = 0; k < nb; ++k)
            if (basis[k].kind == TwoCycle::Kind::TorusPlane) {
                om(basis[k].i, basis[k].j) = q[k];
                om(basis[k].j, basis[k].i) = -q[k];
            }
        if (ratlin::pfaffian(om).is_zero())
            throw IntegralizationError(IntegralizationError::Kind::RoundingBrokeNondegeneracy,
                                       "rounded torus form is degenerate");
    }
    for (std::size_t k = 0; k < nb; ++k)
        if (basis[k].kind == TwoCycle::Kind::Sphere && q[k].sign() <= 0)
            throw IntegralizationError(IntegralizationError::Kind::RoundingBrokeNondegeneracy,
                                       "rounded sphere coefficient is not positive");

    ProductManifold rounded = with_form(m, q);
    if (!(classify_action(period_matrix(rounded, a)) == before))
        throw IntegralizationError(IntegralizationError::Kind::RoundingBrokeConditionB,
                                   "rounded form changes the Hamiltonian splitting");

    const Integer k = ratlin::lcm_of_denominators(q);
    RatVector scaled(nb);
    for (std::size_t i = 0; i < nb; ++i) scaled[i] = Rational(k) * q[i];

    IntegralizationResult res{with_form(m, scaled), k, q, {}, 0.0, max_denominator, 1};
    for (std::size_t i = 0; i < nb; ++i) {
        res.a.push_back(coeffs[i].value());
        res.max_deviation = std::max(res.max_deviation, std::abs(q[i].to_double() - coeffs[i].value()));
    }
    return res;
}

IntegralizationResult integralize_form(const ProductManifold& m, const ActionSpec& a, const Integer& max_denominator,
                                       const Integer& limit) {
    if (sgn(max_denominator) <= 0) throw std::invalid_argument("max_denominator must be positive");
    Integer d = max_denominator;
    std::size_t attempts = 0;
    std::string last;
    while (d <= limit || attempts == 0) {
        ++attempts;
        try {
            IntegralizationResult r = integralize_once(m, a, d);
            r.attempts = attempts;
            return r;
        } catch (const IntegralizationError& e) {
            last = e.what();
        }
        d *= 2;
    }
    throw IntegralizationError(IntegralizationError::Kind::Exhausted,
                               "integralization failed up to max_denominator " + limit.get_str() + ": " + last);
}

}  // namespace momentforge::hamclass
