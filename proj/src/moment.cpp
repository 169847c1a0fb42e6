#include "momentforge/moment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace momentforge::moment {

namespace {

using ratlin::Rational;

bool is_zero_vector(const IntVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Integer& z) { return sgn(z) == 0; });
}

// Solves a small dense symmetric system by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(a[i][c]) > std::abs(a[best][c])) best = i;
        std::swap(a[c], a[best]);
        std::swap(b[c], b[best]);
        if (a[c][c] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (a[i][i] != 0.0) x[i] = b[i] / a[i][i];
    return x;
}

}  // namespace

double HamiltonianComponent::operator()(const ProductManifold& m, const Point& x) const {
    double s = 0.0;
    for (std::size_t f = 0; f < sphere_slopes.size(); ++f) s += sphere_slopes[f] * x[m.height_index(f)];
    return s;
}

double CircleComponent::raw(const ProductManifold& m, const Point& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < covector.size(); ++k)
        if (sgn(covector[k]) != 0) s += covector[k].get_d() * (x[k] - basepoint[k]);
    for (std::size_t f = 0; f < sphere_slopes.size(); ++f) {
        const std::size_t h = m.height_index(f);
        s += sphere_slopes[f] * (x[h] - basepoint[h]);
    }
    return s;
}

double CircleComponent::path_integral(const ProductManifold& m, const Point& x) const {
    return path_integral(m, geom::Path{{basepoint, x}});
}

double CircleComponent::path_integral(const ProductManifold& m, const geom::Path& p) const {
    return geom::quadrature_oneform_along_path(m, field, p);
}

MomentValue GeneralizedMoment::operator()(const Point& x) const {
    MomentValue v;
    for (const auto& h : mu1) v.mu1.push_back(h(omega_prime, x));
    for (const auto& c : mu2) v.mu2.push_back(c(omega_prime, x).representative);
    return v;
}

Point default_basepoint(const ProductManifold& m) {
    Point p(m.dimension(), 0.0);
    for (std::size_t f = 0; f < m.sphere_count(); ++f) p[m.height_index(f)] = -1.0;
    return p;
}

HamiltonianComponent hamiltonian_component(const ProductManifold& omega_prime, const ActionSpec& a,
                                           const IntVector& combination) {
    geom::VectorField f = geom::combination_field(omega_prime, a, combination);
    if (!is_zero_vector(f.translation)) throw std::invalid_argument("combination translates the torus factor");
    HamiltonianComponent h;
    h.combination = combination;
    for (std::size_t s = 0; s < omega_prime.sphere_count(); ++s)
        h.sphere_slopes.push_back(f.sign * omega_prime.sphere_coefficient(s) * f.speeds[s].get_d());
    return h;
}

std::vector<HamiltonianComponent> hamiltonian_components(const ProductManifold& omega_prime, const ActionSpec& a,
                                                         const ActionClassification& cls) {
    if (cls.c == 0) throw MomentError(MomentError::Kind::NoHamiltonianPart, "action has no Hamiltonian part");
    std::vector<HamiltonianComponent> out;
    for (std::size_t i = 0; i < cls.c; ++i) out.push_back(hamiltonian_component(omega_prime, a, cls.hamiltonian.row(i)));
    return out;
}

CircleComponent mcduff_component(const ProductManifold& omega_prime, const ActionSpec& a, const IntVector& eta,
                                 const Point& basepoint) {
    if (!omega_prime.is_exact()) throw MomentError(MomentError::Kind::NonIntegralForm, "form is not rational");
    CircleComponent c;
    c.combination = eta;
    c.field = geom::combination_field(omega_prime, a, eta);
    c.basepoint = basepoint;
    const std::size_t n = omega_prime.torus_dim();
    for (std::size_t k = 0; k < n; ++k) {
        Rational s(0);
        for (std::size_t i = 0; i < n; ++i)
            if (sgn(c.field.translation[i]) != 0)
                s += Rational(c.field.translation[i]) * omega_prime.torus()->omega(i, k).rational();
        s = Rational(c.field.sign) * s;
        if (!s.is_integer())
            throw MomentError(MomentError::Kind::NonIntegralForm,
                              "period " + s.str() + " of the circle generator is not an integer");
        c.covector.push_back(s.numerator());
    }
    if (is_zero_vector(c.covector))
        throw MomentError(MomentError::Kind::GeneratorIsHamiltonian, "circle generator has no nonzero period");
    for (std::size_t f = 0; f < omega_prime.sphere_count(); ++f)
        c.sphere_slopes.push_back(c.field.sign * omega_prime.sphere_coefficient(f) * c.field.speeds[f].get_d());
    return c;
}

GeneralizedMoment generalized_moment(const ProductManifold& omega_prime, const ActionSpec& a,
                                     const ActionClassification& cls) {
    GeneralizedMoment g{omega_prime, a, cls, default_basepoint(omega_prime), {}, {}};
    if (cls.c > 0) g.mu1 = hamiltonian_components(omega_prime, a, cls);
    for (std::size_t i = 0; i < cls.r; ++i)
        g.mu2.push_back(mcduff_component(omega_prime, a, cls.complement.row(i), g.basepoint));
    return g;
}

PathIndependenceReport path_independence_check(const ProductManifold& m, const CircleComponent& mu, const Point& x,
                                               const std::vector<std::int64_t>& loop) {
    if (loop.size() != m.torus_dim()) throw std::invalid_argument("loop direction has the wrong length");
    Point corner = mu.basepoint, end = x;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        corner[k] += static_cast<double>(loop[k]);
        end[k] += static_cast<double>(loop[k]);
    }
    PathIndependenceReport r;
    r.direct = mu.path_integral(m, x);
    r.detour = mu.path_integral(m, geom::Path{{mu.basepoint, corner, end}});
    r.difference = r.detour - r.direct;
    r.integral = std::abs(r.difference - std::round(r.difference)) <= kCircleTolerance;
    r.equal_mod_one = CircleValue::of(r.direct).approx_equal(CircleValue::of(r.detour));
    return r;
}

FiberFactorization fiber_connected_factorization(const IntVector& covector) {
    if (is_zero_vector(covector)) throw MomentError(MomentError::Kind::ZeroCovector, "covector is zero");
    FiberFactorization f{ratlin::content(covector), {}};
    for (const auto& x : covector) f.reduced.push_back(x / f.d);
    return f;
}

FixedPointLocalData local_weights(const ProductManifold& m, const ActionSpec& a, const Point& p) {
    for (std::size_t j = 0; j < a.size(); ++j)
        if (geom::field_norm(m, geom::fundamental_field(m, a, j), p) > 1e-12)
            throw MomentError(MomentError::Kind::NotAFixedPoint,
                              "generator " + std::to_string(j + 1) + " does not vanish at the point");
    const long eps = geom::sign_factor(a.sign());
    FixedPointLocalData d{p, {}};
    for (std::size_t k = 0; k < m.torus_dim() / 2; ++k) d.weights.emplace_back(a.size(), Integer(0));
    for (std::size_t f = 0; f < m.sphere_count(); ++f) {
        const long pole = p[m.height_index(f)] < 0.0 ? 1 : -1;
        IntVector w(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) w[j] = Integer(pole * eps * static_cast<long>(a.generator(j).speeds[f]));
        d.weights.push_back(std::move(w));
    }
    return d;
}

LocalModelReport local_model_check(const GeneralizedMoment& mu, const Point& p, double radius) {
    const ProductManifold& m = mu.omega_prime;
    const FixedPointLocalData local = local_weights(m, mu.action, p);
    const std::size_t planes = m.dimension() / 2;

    std::mt19937_64 rng(0x5eed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::vector<double>> coords;
    for (int s = 0; s < 400; ++s) {
        std::vector<double> z(2 * planes);
        for (std::size_t k = 0; k < planes; ++k) {
            const double r = radius * std::sqrt(unit()), phi = 2.0 * std::numbers::pi * unit();
            z[2 * k] = r * std::cos(phi);
            z[2 * k + 1] = r * std::sin(phi);
        }
        coords.push_back(std::move(z));
    }

    LocalModelReport rep;
    for (const auto& h : mu.mu1) {
        std::vector<std::vector<double>> ata(planes + 1, std::vector<double>(planes + 1, 0.0));
        std::vector<double> atb(planes + 1, 0.0);
        std::vector<std::vector<double>> rows;
        std::vector<double> vals;
        for (const auto& z : coords) {
            std::vector<double> row{1.0};
            for (std::size_t k = 0; k < planes; ++k) row.push_back(z[2 * k] * z[2 * k] + z[2 * k + 1] * z[2 * k + 1]);
            const double v = h(m, geom::darboux_chart(m, p, z));
            for (std::size_t i = 0; i <= planes; ++i) {
                atb[i] += row[i] * v;
                for (std::size_t j = 0; j <= planes; ++j) ata[i][j] += row[i] * row[j];
            }
            rows.push_back(std::move(row));
            vals.push_back(v);
        }
        const std::vector<double> coef = solve(ata, atb);
        for (std::size_t s = 0; s < rows.size(); ++s) {
            double fit = 0.0;
            for (std::size_t i = 0; i <= planes; ++i) fit += coef[i] * rows[s][i];
            rep.max_residual = std::max(rep.max_residual, std::abs(fit - vals[s]));
        }
        std::vector<double> w;
        for (std::size_t k = 0; k < planes; ++k) w.push_back(coef[k + 1] / std::numbers::pi);
        rep.fitted_weights.push_back(std::move(w));

        double lowest = 0.0;
        for (double s : h.sphere_slopes) lowest -= std::abs(s);
        const bool minimal = h(m, p) <= lowest + 1e-12;
        rep.minimizes.push_back(minimal);
        if (minimal)
            for (const auto& alpha : local.weights) {
                Integer pair(0);
                for (std::size_t j = 0; j < alpha.size(); ++j) pair += alpha[j] * h.combination[j];
                if (sgn(pair) < 0) rep.minimum_weights_nonnegative = false;
            }
    }

    for (const auto& c : mu.mu2) {
        const double at = c.raw(m, p);
        bool above = true, below = true;
        for (const auto& z : coords) {
            double d = c.raw(m, geom::darboux_chart(m, p, z)) - at;
            d -= std::round(d);
            if (d < 0.0) above = false;
            if (d > 0.0) below = false;
        }
        if (above || below) rep.circle_extremum = true;
    }
    return rep;
}

}  // namespace momentforge::moment
