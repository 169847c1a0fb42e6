#include "momentforge/geom.hpp"

#include "momentforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace momentforge::geom {

namespace {

double torus_pairing(const ProductManifold& m, std::span<const double> u, std::span<const double> w) {
    const std::size_t n = m.torus_dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) s += u[i] * m.torus()->omega(i, j).value() * w[j];
    }
    return s;
}

double sphere_pairing(const ProductManifold& m, std::size_t f, const Tangent& u, const Tangent& w) {
    const std::size_t t = m.theta_index(f);
    const std::size_t h = m.height_index(f);
    return m.sphere_coefficient(f) * (u[t] * w[h] - u[h] * w[t]);
}

Point lerp(const Point& a, const Point& b, double t) {
    Point p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficient

Coefficient Coefficient::parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty coefficient");
    if (s.find_first_of(".eE") != std::string::npos) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse coefficient '" + s + "'");
        }
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("cannot parse coefficient '" + s + "'");
        return real(v);
    }
    return exact(Rational::parse(s));
}

const Rational& Coefficient::rational() const {
    if (!exact_) throw GeometryError("coefficient has no exact rational value");
    return *exact_;
}

std::string Coefficient::str() const {
    if (exact_) return exact_->str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
}

Coefficient Coefficient::operator-() const {
    if (exact_) return exact(-*exact_);
    return real(-value_);
}

bool operator==(const Coefficient& a, const Coefficient& b) {
    if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
    return a.value_ == b.value_;
}

std::string_view to_string(SignConvention s) { return s == SignConvention::Plus ? "plus" : "minus"; }

SignConvention parse_sign_convention(std::string_view text) {
    if (text == "plus" || text == "+") return SignConvention::Plus;
    if (text == "minus" || text == "-") return SignConvention::Minus;
    throw std::invalid_argument("sign convention must be 'plus' or 'minus'");
}

// ---------------------------------------------------------------------------
// Factors

FlatTorusFactor::FlatTorusFactor(std::size_t dim, std::vector<Coefficient> omega)
    : dim_(dim), omega_(std::move(omega)) {
    if (dim_ == 0 || dim_ % 2 != 0) throw GeometryError("torus factor dimension must be even and positive");
    if (omega_.size() != dim_ * dim_) throw GeometryError("torus form has the wrong number of entries");
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            if (!(this->omega(i, j) == -this->omega(j, i))) throw GeometryError("torus form is not antisymmetric");
    if (is_exact()) {
        if (ratlin::pfaffian(exact_omega()).is_zero()) throw GeometryError("torus form is degenerate (Pfaffian 0)");
    } else if (std::abs(ratlin::pfaffian(real_omega())) < 1e-12) {
        throw GeometryError("torus form is degenerate (Pfaffian 0)");
    }
}

bool FlatTorusFactor::is_exact() const {
    return std::all_of(omega_.begin(), omega_.end(), [](const Coefficient& c) { return c.is_exact(); });
}

RealMatrix FlatTorusFactor::real_omega() const {
    RealMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = omega(i, j).value();
    return m;
}

RatMatrix FlatTorusFactor::exact_omega() const {
    RatMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = omega(i, j).rational();
    return m;
}

SphereFactor::SphereFactor(Coefficient area_coefficient) : c_(std::move(area_coefficient)) {
    if (!(c_.value() > 0.0)) throw GeometryError("sphere area coefficient must be positive");
}

ProductManifold::ProductManifold(std::optional<FlatTorusFactor> torus, std::vector<SphereFactor> spheres)
    : torus_(std::move(torus)), spheres_(std::move(spheres)) {
    if (dimension() == 0) throw GeometryError("manifold has no factors");
}

bool ProductManifold::is_exact() const {
    if (torus_ && !torus_->is_exact()) return false;
    return std::all_of(spheres_.begin(), spheres_.end(),
                       [](const SphereFactor& s) { return s.area_coefficient().is_exact(); });
}

std::string ProductManifold::describe() const {
    std::ostringstream os;
    bool first = true;
    if (torus_) {
        os << "T^" << torus_->dim();
        first = false;
    }
    for (const auto& s : spheres_) {
        if (!first) os << " x ";
        os << "S^2(c=" << s.area_coefficient().str() << ")";
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Actions and fields

ActionSpec::ActionSpec(const ProductManifold& m, std::vector<Generator> generators, SignConvention sign)
    : generators_(std::move(generators)), torus_dim_(m.torus_dim()), sphere_count_(m.sphere_count()), sign_(sign) {
    for (std::size_t j = 0; j < generators_.size(); ++j) {
        const auto& g = generators_[j];
        if (g.translation.size() != torus_dim_ || g.speeds.size() != sphere_count_)
            throw GeometryError("generator " + std::to_string(j + 1) + " does not match the manifold's factors");
        bool nontrivial = std::any_of(g.translation.begin(), g.translation.end(), [](auto v) { return v != 0; }) ||
                          std::any_of(g.speeds.begin(), g.speeds.end(), [](auto v) { return v != 0; });
        if (!nontrivial) throw GeometryError("generator " + std::to_string(j + 1) + " is trivial");
    }
}

ActionSpec ActionSpec::with_sign(SignConvention s) const {
    ActionSpec copy = *this;
    copy.sign_ = s;
    return copy;
}

IntMatrix ActionSpec::combined_matrix() const {
    IntMatrix out(generators_.size(), torus_dim_ + sphere_count_);
    for (std::size_t j = 0; j < generators_.size(); ++j) {
        for (std::size_t k = 0; k < torus_dim_; ++k) out(j, k) = static_cast<long>(generators_[j].translation[k]);
        for (std::size_t f = 0; f < sphere_count_; ++f)
            out(j, torus_dim_ + f) = static_cast<long>(generators_[j].speeds[f]);
    }
    return out;
}

IntMatrix ActionSpec::translation_matrix() const {
    IntMatrix out(generators_.size(), torus_dim_);
    for (std::size_t j = 0; j < generators_.size(); ++j)
        for (std::size_t k = 0; k < torus_dim_; ++k) out(j, k) = static_cast<long>(generators_[j].translation[k]);
    return out;
}

bool ActionSpec::effective() const {
    if (generators_.empty()) return true;
    ratlin::SmithForm s = ratlin::smith_normal_form(combined_matrix());
    if (s.rank != generators_.size()) return false;
    for (std::size_t i = 0; i < s.rank; ++i)
        if (s.d(i, i) != 1) return false;
    return true;
}

Tangent VectorField::at(const ProductManifold& m, const Point& x) const {
    if (x.size() != m.dimension()) throw std::invalid_argument("point dimension mismatch");
    Tangent v(m.dimension(), 0.0);
    for (std::size_t k = 0; k < m.torus_dim(); ++k) v[k] = sign * translation[k].get_d();
    for (std::size_t f = 0; f < m.sphere_count(); ++f) v[m.theta_index(f)] = sign * speeds[f].get_d();
    return v;
}

bool VectorField::is_zero() const {
    auto nz = [](const Integer& z) { return sgn(z) != 0; };
    return std::none_of(translation.begin(), translation.end(), nz) && std::none_of(speeds.begin(), speeds.end(), nz);
}

VectorField fundamental_field(const ProductManifold& m, const ActionSpec& a, std::size_t j) {
    if (j >= a.size()) throw std::out_of_range("generator index out of range");
    IntVector coeffs(a.size(), Integer(0));
    coeffs[j] = 1;
    return combination_field(m, a, coeffs);
}

VectorField combination_field(const ProductManifold& m, const ActionSpec& a, const IntVector& coefficients) {
    if (coefficients.size() != a.size()) throw std::invalid_argument("generator combination has the wrong length");
    VectorField f;
    f.sign = sign_factor(a.sign());
    f.translation.assign(m.torus_dim(), Integer(0));
    f.speeds.assign(m.sphere_count(), Integer(0));
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (sgn(coefficients[j]) == 0) continue;
        const Generator& g = a.generator(j);
        for (std::size_t k = 0; k < m.torus_dim(); ++k) f.translation[k] += coefficients[j] * static_cast<long>(g.translation[k]);
        for (std::size_t s = 0; s < m.sphere_count(); ++s) f.speeds[s] += coefficients[j] * static_cast<long>(g.speeds[s]);
    }
    return f;
}

double field_norm(const ProductManifold& m, const VectorField& field, const Point& x) {
    double sq = 0.0;
    for (std::size_t k = 0; k < m.torus_dim(); ++k) sq += field.translation[k].get_d() * field.translation[k].get_d();
    for (std::size_t f = 0; f < m.sphere_count(); ++f) {
        const double h = x[m.height_index(f)];
        const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
        const double v = 2.0 * std::numbers::pi * field.speeds[f].get_d() * r;
        sq += v * v;
    }
    return std::sqrt(sq);
}

double pairing_eval(const ProductManifold& m, const Tangent& u, const Tangent& w, const Point& x) {
    const std::size_t n = m.dimension();
    if (u.size() != n || w.size() != n || x.size() != n) throw std::invalid_argument("pairing_eval: dimension mismatch");
    double s = torus_pairing(m, u, w);
    for (std::size_t f = 0; f < m.sphere_count(); ++f) s += sphere_pairing(m, f, u, w);
    return s;
}

Rational exact_torus_pairing(const ProductManifold& m, const IntVector& u, const IntVector& w) {
    const std::size_t n = m.torus_dim();
    if (u.size() != n || w.size() != n) throw std::invalid_argument("exact_torus_pairing: dimension mismatch");
    Rational s(0);
    for (std::size_t i = 0; i < n; ++i) {
        if (sgn(u[i]) == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (sgn(w[j]) == 0) continue;
            s += Rational(u[i]) * m.torus()->omega(i, j).rational() * Rational(w[j]);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Loops, cycles, integration

Loop Loop::torus(std::vector<double> base, std::vector<std::int64_t> direction) {
    Loop l;
    l.kind = Kind::Torus;
    l.base = std::move(base);
    l.direction = std::move(direction);
    if (l.base.size() != l.direction.size()) throw std::invalid_argument("torus loop: base/direction size mismatch");
    return l;
}

Loop Loop::latitude(std::size_t sphere, double height, std::int64_t winding) {
    if (!(height >= -1.0 && height <= 1.0)) throw std::invalid_argument("latitude height outside [-1, 1]");
    Loop l;
    l.kind = Kind::Latitude;
    l.sphere = sphere;
    l.height = height;
    l.winding = winding;
    return l;
}

Path Loop::as_path(const ProductManifold& m, const Point& rest) const {
    if (rest.size() != m.dimension()) throw std::invalid_argument("loop: rest point dimension mismatch");
    Point start = rest;
    Point end;
    if (kind == Kind::Torus) {
        if (base.size() != m.torus_dim()) throw std::invalid_argument("torus loop: dimension mismatch");
        for (std::size_t k = 0; k < base.size(); ++k) start[k] = base[k];
        end = start;
        for (std::size_t k = 0; k < base.size(); ++k) end[k] += static_cast<double>(direction[k]);
    } else {
        if (sphere >= m.sphere_count()) throw std::out_of_range("latitude loop: sphere index out of range");
        start[m.height_index(sphere)] = height;
        end = start;
        end[m.theta_index(sphere)] += static_cast<double>(winding);
    }
    return Path{{start, end}};
}

std::string TwoCycle::label() const {
    if (kind == Kind::Sphere) return "S" + std::to_string(sphere + 1);
    return "T" + std::to_string(i + 1) + std::to_string(j + 1);
}

HomologyBases homology_bases(const ProductManifold& m) {
    HomologyBases b;
    const std::size_t n = m.torus_dim();
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<std::int64_t> dir(n, 0);
        dir[k] = 1;
        b.loops.push_back(Loop::torus(std::vector<double>(n, 0.0), dir));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            TwoCycle c;
            c.kind = TwoCycle::Kind::TorusPlane;
            c.i = i;
            c.j = j;
            b.cycles.push_back(c);
        }
    for (std::size_t f = 0; f < m.sphere_count(); ++f) {
        TwoCycle c;
        c.kind = TwoCycle::Kind::Sphere;
        c.sphere = f;
        b.cycles.push_back(c);
    }
    return b;
}

void require_closed(const ProductManifold& m, const Path& p) {
    if (p.vertices.size() < 2) throw GeometryError("open curve: path has fewer than two vertices");
    const Point& a = p.vertices.front();
    const Point& b = p.vertices.back();
    auto is_int = [](double d) { return std::abs(d - std::round(d)) < 1e-12; };
    for (std::size_t k = 0; k < m.torus_dim(); ++k)
        if (!is_int(b[k] - a[k])) throw GeometryError("open curve: torus endpoints differ by a non-lattice vector");
    for (std::size_t f = 0; f < m.sphere_count(); ++f) {
        const double ha = a[m.height_index(f)], hb = b[m.height_index(f)];
        if (std::abs(ha - hb) > 1e-12) throw GeometryError("open curve: sphere endpoints differ in height");
        const bool at_pole = std::abs(std::abs(ha) - 1.0) < 1e-12;
        if (!at_pole && !is_int(b[m.theta_index(f)] - a[m.theta_index(f)]))
            throw GeometryError("open curve: sphere endpoints differ in angle");
    }
}

double integrate_oneform_along_path(const ProductManifold& m, const VectorField& field, const Path& p) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
        const Point& a = p.vertices[s];
        const Point& b = p.vertices[s + 1];
        if (a.size() != m.dimension() || b.size() != m.dimension())
            throw std::invalid_argument("path vertex dimension mismatch");
        Tangent delta(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) delta[i] = b[i] - a[i];
        // Torus block: constant integrand Omega(X, delta).
        if (m.torus_dim() > 0) {
            Tangent x = field.at(m, a);
            total += torus_pairing(m, x, delta);
        }
        for (std::size_t f = 0; f < m.sphere_count(); ++f) {
            auto integrand = [&](double t) {
                Point c = lerp(a, b, t);
                return sphere_pairing(m, f, field.at(m, c), delta);
            };
            total += quad::adaptive_simpson(integrand, 0.0, 1.0).value;
        }
    }
    return total;
}

double quadrature_oneform_along_path(const ProductManifold& m, const VectorField& field, const Path& p) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
        const Point& a = p.vertices[s];
        const Point& b = p.vertices[s + 1];
        Tangent delta(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) delta[i] = b[i] - a[i];
        auto integrand = [&](double t) {
            Point c = lerp(a, b, t);
            return pairing_eval(m, field.at(m, c), delta, c);
        };
        total += quad::adaptive_simpson(integrand, 0.0, 1.0).value;
    }
    return total;
}

double integrate_oneform_over_loop(const ProductManifold& m, const VectorField& field, const Loop& loop) {
    Point rest(m.dimension(), 0.0);
    Path p = loop.as_path(m, rest);
    require_closed(m, p);
    return integrate_oneform_along_path(m, field, p);
}

Rational exact_loop_period(const ProductManifold& m, const VectorField& field, const Loop& loop) {
    if (loop.kind == Loop::Kind::Latitude) return Rational(0);
    IntVector dir;
    for (auto d : loop.direction) dir.emplace_back(static_cast<long>(d));
    IntVector x = field.translation;
    for (auto& v : x) v *= field.sign;
    return exact_torus_pairing(m, x, dir);
}

Coefficient integrate_twoform_over_cycle(const ProductManifold& m, const TwoCycle& s) {
    if (s.kind == TwoCycle::Kind::TorusPlane) {
        if (!m.torus() || s.i >= m.torus_dim() || s.j >= m.torus_dim())
            throw std::out_of_range("two-cycle outside the torus factor");
        return m.torus()->omega(s.i, s.j);
    }
    const Coefficient& c = m.spheres().at(s.sphere).area_coefficient();
    if (c.is_exact()) return Coefficient::exact(c.rational() * Rational(2));
    return Coefficient::real(2.0 * c.value());
}

// ---------------------------------------------------------------------------
// Fixed points, sampling, the action

bool FixedPointSet::finite() const {
    if (empty) return true;
    if (has_torus) return false;
    return std::all_of(sphere_locus.begin(), sphere_locus.end(), [](Locus l) { return l == Locus::Poles; });
}

std::size_t FixedPointSet::count() const {
    if (empty) return 0;
    if (!finite()) throw GeometryError("fixed point set is not finite");
    return std::size_t{1} << sphere_locus.size();
}

std::vector<Point> FixedPointSet::representatives(const ProductManifold& m) const {
    std::vector<Point> out;
    if (empty) return out;
    std::vector<std::size_t> rotated;
    for (std::size_t f = 0; f < sphere_locus.size(); ++f)
        if (sphere_locus[f] == Locus::Poles) rotated.push_back(f);
    const std::size_t combos = std::size_t{1} << rotated.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
        Point p(m.dimension(), 0.0);
        for (std::size_t f = 0; f < m.sphere_count(); ++f) p[m.height_index(f)] = -1.0;
        for (std::size_t r = 0; r < rotated.size(); ++r)
            p[m.height_index(rotated[r])] = (mask >> r) & 1U ? 1.0 : -1.0;
        out.push_back(std::move(p));
    }
    return out;
}

std::string FixedPointSet::describe() const {
    if (empty) return "empty";
    std::ostringstream os;
    bool first = true;
    if (has_torus) {
        os << "torus";
        first = false;
    }
    for (std::size_t f = 0; f < sphere_locus.size(); ++f) {
        if (!first) os << " x ";
        os << (sphere_locus[f] == Locus::Poles ? "poles(S" : "whole(S") << f + 1 << ")";
        first = false;
    }
    if (finite()) os << " [" << count() << " points]";
    return os.str();
}

FixedPointSet fixed_point_set(const ProductManifold& m, const ActionSpec& a) {
    FixedPointSet s;
    s.empty = false;
    for (const auto& g : a.generators())
        if (std::any_of(g.translation.begin(), g.translation.end(), [](auto v) { return v != 0; })) s.empty = true;
    if (s.empty) return s;
    s.has_torus = m.torus_dim() > 0;
    for (std::size_t f = 0; f < m.sphere_count(); ++f) {
        bool rotated = std::any_of(a.generators().begin(), a.generators().end(),
                                   [f](const Generator& g) { return g.speeds[f] != 0; });
        s.sphere_locus.push_back(rotated ? FixedPointSet::Locus::Poles : FixedPointSet::Locus::Whole);
    }
    return s;
}

std::vector<Point> sample_points(const ProductManifold& m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        Point p(m.dimension());
        for (std::size_t k = 0; k < m.torus_dim(); ++k) p[k] = unit();
        for (std::size_t f = 0; f < m.sphere_count(); ++f) {
            p[m.theta_index(f)] = unit();
            p[m.height_index(f)] = -1.0 + 2.0 * unit();
        }
        out.push_back(std::move(p));
    }
    return out;
}

Point act(const ProductManifold& m, const ActionSpec& a, std::span<const double> t, const Point& x) {
    if (t.size() != a.size()) throw std::invalid_argument("act: group element has the wrong length");
    if (x.size() != m.dimension()) throw std::invalid_argument("act: point dimension mismatch");
    Point y = x;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const Generator& g = a.generator(j);
        for (std::size_t k = 0; k < m.torus_dim(); ++k) y[k] += t[j] * static_cast<double>(g.translation[k]);
        for (std::size_t f = 0; f < m.sphere_count(); ++f)
            y[m.theta_index(f)] += t[j] * static_cast<double>(g.speeds[f]);
    }
    for (std::size_t k = 0; k < m.torus_dim(); ++k) y[k] = wrap01(y[k]);
    for (std::size_t f = 0; f < m.sphere_count(); ++f) y[m.theta_index(f)] = wrap01(y[m.theta_index(f)]);
    return y;
}

Point darboux_chart(const ProductManifold& m, const Point& center, std::span<const double> plane) {
    if (plane.size() != m.dimension() || center.size() != m.dimension())
        throw std::invalid_argument("darboux_chart: dimension mismatch");
    Point p = center;
    const std::size_t n = m.torus_dim();
    if (n > 0) {
        // Symplectic Gram-Schmidt on the standard basis.
        RealMatrix omega = m.torus()->real_omega();
        auto w = [&](const std::vector<double>& u, const std::vector<double>& v) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) s += u[i] * omega(i, j) * v[j];
            return s;
        };
        std::vector<std::vector<double>> pool;
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> e(n, 0.0);
            e[k] = 1.0;
            pool.push_back(e);
        }
        for (std::size_t plane_idx = 0; plane_idx < n / 2; ++plane_idx) {
            std::vector<double> e = pool.front();
            pool.erase(pool.begin());
            std::size_t best = 0;
            for (std::size_t k = 1; k < pool.size(); ++k)
                if (std::abs(w(e, pool[k])) > std::abs(w(e, pool[best]))) best = k;
            std::vector<double> f = pool[best];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
            const double ef = w(e, f);
            for (auto& v : f) v /= ef;
            for (auto& v : pool) {
                const double a = w(v, f), b = w(v, e);
                for (std::size_t i = 0; i < n; ++i) v[i] += -a * e[i] + b * f[i];
            }
            const double x = plane[2 * plane_idx], y = plane[2 * plane_idx + 1];
            for (std::size_t i = 0; i < n; ++i) p[i] += x * e[i] + y * f[i];
        }
    }
    for (std::size_t f = 0; f < m.sphere_count(); ++f) {
        const double x = plane[n + 2 * f], y = plane[n + 2 * f + 1];
        const double c = m.sphere_coefficient(f);
        const double h0 = center[m.height_index(f)];
        const double rho2 = x * x + y * y;
        const double phi = std::atan2(y, x) / (2.0 * std::numbers::pi);
        if (std::abs(h0 + 1.0) < 1e-12) {
            p[m.height_index(f)] = -1.0 + std::numbers::pi * rho2 / c;
            p[m.theta_index(f)] = wrap01(-phi);
        } else if (std::abs(h0 - 1.0) < 1e-12) {
            p[m.height_index(f)] = 1.0 - std::numbers::pi * rho2 / c;
            p[m.theta_index(f)] = wrap01(phi);
        } else {
            p[m.theta_index(f)] = center[m.theta_index(f)] + x / c;
            p[m.height_index(f)] = h0 + y;
        }
    }
    return p;
}

double wrap01(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

double circle_distance(double a, double b) {
    const double d = wrap01(a - b);
    return std::min(d, 1.0 - d);
}

}  // namespace momentforge::geom
