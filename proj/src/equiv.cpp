#include "momentforge/equiv.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace momentforge::equiv {

namespace {

using ratlin::Integer;

std::vector<double> unit_samples(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> t(n);
    for (auto& x : t) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return t;
}

std::size_t numeric_rank(std::vector<std::vector<double>> a, double tol) {
    std::size_t rank = 0;
    const std::size_t cols = a.empty() ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t best = rank;
        for (std::size_t i = rank + 1; i < a.size(); ++i)
            if (std::abs(a[i][c]) > std::abs(a[best][c])) best = i;
        if (std::abs(a[best][c]) <= tol) continue;
        std::swap(a[rank], a[best]);
        for (std::size_t i = rank + 1; i < a.size(); ++i) {
            const double f = a[i][c] / a[rank][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

IntMatrix cocycle_matrix(const ProductManifold& omega_prime, const ActionSpec& a, const IntMatrix& complement,
                         const Point& basepoint) {
    const std::size_t r = complement.rows();
    IntMatrix z(r, r);
    std::vector<geom::VectorField> fields;
    for (std::size_t i = 0; i < r; ++i) fields.push_back(geom::combination_field(omega_prime, a, complement.row(i)));
    for (std::size_t j = 0; j < r; ++j) {
        // Orbit circle of exp(t eta_j) through the basepoint, t in [0, 1].
        Point end = basepoint;
        for (std::size_t k = 0; k < omega_prime.torus_dim(); ++k) end[k] += fields[j].translation[k].get_d();
        for (std::size_t f = 0; f < omega_prime.sphere_count(); ++f)
            end[omega_prime.theta_index(f)] += fields[j].speeds[f].get_d();
        geom::Path orbit{{basepoint, end}};
        for (std::size_t i = 0; i < r; ++i) {
            const double v = geom::integrate_oneform_along_path(omega_prime, fields[i], orbit);
            const double rounded = std::round(v);
            if (std::abs(v - rounded) > kIntegralityTolerance)
                throw CocycleError(CocycleError::Kind::NonIntegerPeriod,
                                   "orbit period " + std::to_string(v) + " is not an integer");
            z(i, j) = static_cast<long>(rounded);
        }
    }
    for (std::size_t i = 0; i < r; ++i)
        if (sgn(z(i, i)) != 0) throw CocycleError(CocycleError::Kind::NonzeroDiagonal, "cocycle has a nonzero diagonal entry");
    return z;
}

IntMatrix cocycle_matrix(const GeneralizedMoment& mu) {
    return cocycle_matrix(mu.omega_prime, mu.action, mu.classification.complement, mu.basepoint);
}

std::vector<double> affine_apply(const IntMatrix& z, const std::vector<double>& s, const std::vector<double>& t) {
    if (z.rows() != z.cols() || s.size() != z.cols() || t.size() != z.rows())
        throw std::invalid_argument("affine_apply: dimension mismatch");
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        double v = t[i];
        for (std::size_t j = 0; j < s.size(); ++j)
            if (sgn(z(i, j)) != 0) v += z(i, j).get_d() * s[j];
        out[i] = geom::wrap01(v);
    }
    return out;
}

std::string describe_affine(const IntMatrix& z) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < z.rows(); ++i) {
        if (i) os << ", ";
        for (std::size_t j = 0; j < z.cols(); ++j)
            if (sgn(z(i, j)) != 0) os << "s" << j + 1 << "^" << z(i, j).get_str() << " ";
        os << "t" << i + 1;
    }
    os << ")";
    return os.str();
}

std::vector<double> complement_element(const IntMatrix& complement, const std::vector<double>& t) {
    if (t.size() != complement.rows()) throw std::invalid_argument("complement_element: dimension mismatch");
    std::vector<double> g(complement.cols(), 0.0);
    for (std::size_t j = 0; j < complement.rows(); ++j)
        for (std::size_t k = 0; k < complement.cols(); ++k) g[k] += t[j] * complement(j, k).get_d();
    return g;
}

EquivarianceReport equivariance_check(const GeneralizedMoment& mu, const IntMatrix& z, std::size_t n,
                                      std::uint64_t seed, bool via_paths) {
    const ProductManifold& m = mu.omega_prime;
    const auto points = geom::sample_points(m, n, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto circle = [&](const Point& x) {
        std::vector<double> v;
        for (const auto& c : mu.mu2) v.push_back(geom::wrap01(via_paths ? c.path_integral(m, x) : c.raw(m, x)));
        return v;
    };
    EquivarianceReport rep;
    rep.samples = n;
    for (const auto& x : points) {
        const std::vector<double> t = unit_samples(rng, mu.r());
        const Point y = geom::act(m, mu.action, complement_element(mu.classification.complement, t), x);
        const auto lhs = circle(y);
        const auto rhs = affine_apply(z, t, circle(x));
        for (std::size_t i = 0; i < lhs.size(); ++i)
            rep.max_error = std::max(rep.max_error, geom::circle_distance(lhs[i], rhs[i]));
        for (const auto& h : mu.mu1) rep.max_mu1_error = std::max(rep.max_mu1_error, std::abs(h(m, y) - h(m, x)));
    }
    return rep;
}

IsotropyReport isotropic_orbit_test(const ProductManifold& omega_prime, const ActionSpec& a,
                                    const std::vector<Point>& points) {
    IsotropyReport rep;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& x : points) {
                const double v = geom::pairing_eval(omega_prime, geom::fundamental_field(omega_prime, a, i).at(omega_prime, x),
                                                    geom::fundamental_field(omega_prime, a, j).at(omega_prime, x), x);
                rep.max_pairing = std::max(rep.max_pairing, std::abs(v));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!points.empty()) rep.spread = std::max(rep.spread, hi - lo);
        }
    return rep;
}

NaturalEquivarianceVerdict natural_equivariance_test(const GeneralizedMoment& mu, std::size_t n, std::uint64_t seed) {
    const ProductManifold& m = mu.omega_prime;
    NaturalEquivarianceVerdict v;
    v.has_fixed_points = !geom::fixed_point_set(m, mu.action).empty;
    const auto points = geom::sample_points(m, n, seed);
    v.isotropic = isotropic_orbit_test(m, mu.action, points).isotropic();
    const IntMatrix z = cocycle_matrix(mu);
    v.z_zero = std::all_of(z.data().begin(), z.data().end(), [](const Integer& x) { return sgn(x) == 0; });
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    for (const auto& x : points) {
        const Point y = geom::act(m, mu.action, unit_samples(rng, mu.action.size()), x);
        for (const auto& c : mu.mu2)
            v.invariance_error = std::max(v.invariance_error, c(m, y).distance(c(m, x)));
    }
    v.mu2_invariant = v.invariance_error < kIntegralityTolerance;
    return v;
}

std::string LocalFreenessVerdict::summary() const {
    if (r == 0) return "vacuous (r = 0)";
    std::string s = "rank Z = " + std::to_string(rank_z) + ", r = " + std::to_string(r) + "; ";
    s += hypothesis ? "corollary applies" : "corollary not applicable";
    s += locally_free ? "; action locally free" : "; action not locally free";
    return s;
}

LocalFreenessVerdict local_freeness_check(const GeneralizedMoment& mu, const IntMatrix& z, std::size_t n,
                                          std::uint64_t seed) {
    const ProductManifold& m = mu.omega_prime;
    LocalFreenessVerdict v;
    v.r = mu.r();
    v.rank_z = ratlin::integer_rank(z);
    v.hypothesis = v.rank_z == v.r;
    std::vector<Point> points = geom::sample_points(m, n, seed);
    // Poles are where sphere rotations stop contributing.
    Point pole = mu.basepoint;
    points.push_back(pole);
    for (std::size_t f = 0; f < m.sphere_count(); ++f) pole[m.height_index(f)] = 1.0;
    points.push_back(pole);
    v.locally_free = true;
    for (const auto& x : points) {
        std::vector<std::vector<double>> rows;
        for (const auto& c : mu.mu2) {
            geom::Tangent t = c.field.at(m, x);
            for (std::size_t f = 0; f < m.sphere_count(); ++f) {
                const double h = x[m.height_index(f)];
                t[m.theta_index(f)] *= std::sqrt(std::max(0.0, 1.0 - h * h));
            }
            rows.push_back(std::move(t));
        }
        if (numeric_rank(rows, 1e-12) != v.r) v.locally_free = false;
    }
    return v;
}

}  // namespace momentforge::equiv
