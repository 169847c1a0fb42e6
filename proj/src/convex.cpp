#include "momentforge/convex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace momentforge::convex {

namespace {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec sub(const Vec& a, const Vec& b) {
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

Vec cross3(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Solves A x = b for the minimum-norm x, A with full row rank.
Vec min_norm_solve(const std::vector<Vec>& a, const Vec& b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<Vec> g(rows, Vec(rows + 1, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < rows; ++j) g[i][j] = dot(a[i], a[j]);
        g[i][rows] = b[i];
    }
    for (std::size_t c = 0; c < rows; ++c) {
        std::size_t best = c;
        for (std::size_t i = c + 1; i < rows; ++i)
            if (std::abs(g[i][c]) > std::abs(g[best][c])) best = i;
        std::swap(g[c], g[best]);
        if (g[c][c] == 0.0) throw std::invalid_argument("min_norm_solve: rank deficient system");
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == c) continue;
            const double f = g[i][c] / g[c][c];
            for (std::size_t j = c; j <= rows; ++j) g[i][j] -= f * g[c][j];
        }
    }
    Vec x(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        const double y = g[i][rows] / g[i][i];
        for (std::size_t j = 0; j < cols; ++j) x[j] += y * a[i][j];
    }
    return x;
}

struct Face {
    std::array<std::size_t, 3> v;
    Vec normal;
    double offset = 0.0;
    bool alive = true;
};

Face make_face(const std::vector<Vec>& p, std::size_t a, std::size_t b, std::size_t c, const Vec& interior) {
    Face f{{a, b, c}, cross3(sub(p[b], p[a]), sub(p[c], p[a])), 0.0, true};
    if (dot(f.normal, sub(interior, p[a])) > 0.0) {
        std::swap(f.v[1], f.v[2]);
        for (auto& x : f.normal) x = -x;
    }
    const double n = norm(f.normal);
    for (auto& x : f.normal) x /= n;
    f.offset = dot(f.normal, p[a]);
    return f;
}

std::vector<Face> hull3(const std::vector<Vec>& p, double eps) {
    auto farthest = [&](auto&& dist) {
        std::size_t best = 0;
        double bd = -1.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = dist(p[i]);
            if (d > bd) {
                bd = d;
                best = i;
            }
        }
        return best;
    };
    const std::size_t i0 = 0;
    const std::size_t i1 = farthest([&](const Vec& x) { return norm(sub(x, p[i0])); });
    const Vec e1 = sub(p[i1], p[i0]);
    const std::size_t i2 = farthest([&](const Vec& x) { return norm(cross3(e1, sub(x, p[i0]))); });
    const Vec nrm = cross3(e1, sub(p[i2], p[i0]));
    const std::size_t i3 = farthest([&](const Vec& x) { return std::abs(dot(nrm, sub(x, p[i0]))); });
    Vec interior(3, 0.0);
    for (auto i : {i0, i1, i2, i3})
        for (std::size_t k = 0; k < 3; ++k) interior[k] += p[i][k] / 4.0;

    std::vector<Face> faces{make_face(p, i0, i1, i2, interior), make_face(p, i0, i1, i3, interior),
                            make_face(p, i0, i2, i3, interior), make_face(p, i1, i2, i3, interior)};
    for (std::size_t q = 0; q < p.size(); ++q) {
        if (q == i0 || q == i1 || q == i2 || q == i3) continue;
        std::map<std::pair<std::size_t, std::size_t>, bool> edges;
        bool any = false;
        for (auto& f : faces) {
            if (!f.alive || dot(f.normal, p[q]) - f.offset <= eps) continue;
            any = true;
            f.alive = false;
            for (int e = 0; e < 3; ++e) edges[{f.v[e], f.v[(e + 1) % 3]}] = true;
        }
        if (!any) continue;
        std::vector<Face> added;
        for (const auto& [edge, unused] : edges)
            if (!edges.count({edge.second, edge.first})) added.push_back(make_face(p, edge.first, edge.second, q, interior));
        std::erase_if(faces, [](const Face& f) { return !f.alive; });
        faces.insert(faces.end(), added.begin(), added.end());
    }
    return faces;
}

Vec circle_values(const GeneralizedMoment& mu, const Point& x) {
    Vec v;
    for (const auto& c : mu.mu2) v.push_back(c(mu.omega_prime, x).representative);
    return v;
}

Vec mu1_values(const GeneralizedMoment& mu, const Point& x) {
    Vec v;
    for (const auto& h : mu.mu1) v.push_back(h(mu.omega_prime, x));
    return v;
}

}  // namespace

ImageSample moment_image_sample(const GeneralizedMoment& mu, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("moment_image_sample: need at least one sample");
    ImageSample s;
    s.preimages = geom::sample_points(mu.omega_prime, n, seed);
    for (const auto& x : s.preimages) {
        s.mu1.push_back(mu1_values(mu, x));
        s.mu2.push_back(circle_values(mu, x));
    }
    return s;
}

Vec MomentPolytope::local(const Vec& x) const {
    const Vec d = sub(x, origin_);
    Vec y;
    for (const auto& b : basis_) y.push_back(dot(d, b));
    return y;
}

bool MomentPolytope::contains(const Vec& x, double tol) const {
    if (x.size() != ambient_) throw std::invalid_argument("contains: dimension mismatch");
    const Vec y = local(x);
    Vec r = sub(x, origin_);
    for (std::size_t i = 0; i < basis_.size(); ++i)
        for (std::size_t k = 0; k < ambient_; ++k) r[k] -= y[i] * basis_[i][k];
    if (norm(r) > tol) return false;
    if (rank() == 1) return y[0] >= lo_ - tol && y[0] <= hi_ + tol;
    for (const auto& f : facets_)
        if (dot(f.normal, y) - f.offset > tol) return false;
    return true;
}

Vec MomentPolytope::lower() const {
    Vec lo(ambient_, INFINITY);
    for (const auto& v : vertices_)
        for (std::size_t k = 0; k < ambient_; ++k) lo[k] = std::min(lo[k], v[k]);
    return lo;
}

Vec MomentPolytope::upper() const {
    Vec hi(ambient_, -INFINITY);
    for (const auto& v : vertices_)
        for (std::size_t k = 0; k < ambient_; ++k) hi[k] = std::max(hi[k], v[k]);
    return hi;
}

MomentPolytope convex_hull(const std::vector<Vec>& points, std::size_t dim, double tol) {
    if (dim > 3) throw std::invalid_argument("convex_hull: dimension above 3");
    if (points.empty()) throw std::invalid_argument("convex_hull: empty point set");
    for (const auto& p : points)
        if (p.size() != dim) throw std::invalid_argument("convex_hull: dimension mismatch");
    MomentPolytope h;
    h.ambient_ = dim;
    h.origin_ = points[0];

    double extent = 1.0;
    for (const auto& p : points)
        for (double x : p) extent = std::max(extent, std::abs(x));
    const double eps = tol * extent;

    // Affine hull: repeatedly adjoin the point farthest from the current span.
    while (h.basis_.size() < dim) {
        double best = 0.0;
        Vec dir;
        for (const auto& p : points) {
            Vec r = sub(p, h.origin_);
            for (const auto& b : h.basis_) {
                const double c = dot(r, b);
                for (std::size_t k = 0; k < dim; ++k) r[k] -= c * b[k];
            }
            const double n = norm(r);
            if (n > best) {
                best = n;
                dir = r;
            }
        }
        if (best <= eps) break;
        for (auto& x : dir) x /= best;
        h.basis_.push_back(dir);
    }

    std::vector<Vec> loc;
    for (const auto& p : points) loc.push_back(h.local(p));
    const std::size_t k = h.basis_.size();

    if (k == 0) {
        h.vertices_ = {points[0]};
    } else if (k == 1) {
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < loc.size(); ++i) {
            if (loc[i][0] < loc[lo][0]) lo = i;
            if (loc[i][0] > loc[hi][0]) hi = i;
        }
        h.lo_ = loc[lo][0];
        h.hi_ = loc[hi][0];
        h.vertices_ = {points[lo], points[hi]};
    } else if (k == 2) {
        std::vector<std::size_t> idx(loc.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return loc[a] < loc[b]; });
        std::vector<std::size_t> chain(2 * idx.size());
        std::size_t n = 0;
        for (std::size_t i : idx) {
            while (n >= 2 && cross2(loc[chain[n - 2]], loc[chain[n - 1]], loc[i]) <= eps * eps) --n;
            chain[n++] = i;
        }
        const std::size_t lower = n + 1;
        for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
            while (n >= lower && cross2(loc[chain[n - 2]], loc[chain[n - 1]], loc[*it]) <= eps * eps) --n;
            chain[n++] = *it;
        }
        chain.resize(n - 1);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const Vec& a = loc[chain[i]];
            const Vec& b = loc[chain[(i + 1) % chain.size()]];
            Vec nrm{b[1] - a[1], a[0] - b[0]};
            const double len = norm(nrm);
            for (auto& x : nrm) x /= len;
            h.facets_.push_back({nrm, dot(nrm, a)});
            h.vertices_.push_back(points[chain[i]]);
        }
    } else {
        const auto faces = hull3(loc, eps);
        std::vector<std::size_t> used;
        for (const auto& f : faces) {
            h.facets_.push_back({f.normal, f.offset});
            used.insert(used.end(), f.v.begin(), f.v.end());
        }
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        for (auto i : used) h.vertices_.push_back(points[i]);
    }
    return h;
}

MomentPolytope moment_polytope(const GeneralizedMoment& mu) {
    const std::size_t k = mu.omega_prime.sphere_count();
    std::vector<Vec> pts;
    Point x = mu.basepoint;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        for (std::size_t f = 0; f < k; ++f) x[mu.omega_prime.height_index(f)] = (mask >> f) & 1 ? 1.0 : -1.0;
        pts.push_back(mu1_values(mu, x));
    }
    return convex_hull(pts, mu.c());
}

CoverageReport product_coverage_check(const GeneralizedMoment& mu, std::size_t grid, std::size_t n, std::uint64_t seed) {
    if (grid == 0) throw std::invalid_argument("coverage grid must be positive");
    const std::size_t c = mu.c(), r = mu.r(), dims = c + r;
    CoverageReport rep;
    rep.grid = grid;
    rep.samples = n;
    rep.cells = 1;
    for (std::size_t i = 0; i < dims; ++i) {
        if (rep.cells > 20'000'000 / grid) throw std::invalid_argument("coverage grid has too many cells");
        rep.cells *= grid;
    }
    const MomentPolytope delta = moment_polytope(mu);
    const Vec lo = delta.lower(), hi = delta.upper();

    // Cells of the mu1 box that lie inside Delta.
    std::size_t box = 1;
    for (std::size_t i = 0; i < c; ++i) box *= grid;
    std::vector<bool> inside(box, true);
    for (std::size_t cell = 0; cell < box; ++cell) {
        std::vector<std::size_t> digit(c);
        for (std::size_t i = c, rest = cell; i-- > 0; rest /= grid) digit[i] = rest % grid;
        for (std::size_t corner = 0; corner < (std::size_t{1} << c) && inside[cell]; ++corner) {
            Vec x(c);
            for (std::size_t i = 0; i < c; ++i) {
                const double w = (hi[i] - lo[i]) / static_cast<double>(grid);
                x[i] = lo[i] + w * static_cast<double>(digit[i] + ((corner >> i) & 1));
            }
            if (!delta.contains(x, 1e-9)) inside[cell] = false;
        }
    }

    rep.hits.assign(rep.cells, 0);
    const ImageSample s = moment_image_sample(mu, n, seed);
    auto bin = [grid](double t) {
        const auto b = static_cast<std::size_t>(std::max(0.0, std::floor(t * static_cast<double>(grid))));
        return std::min(b, grid - 1);
    };
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < c; ++i) {
            const double w = hi[i] - lo[i];
            idx = idx * grid + bin(w > 0.0 ? (s.mu1[k][i] - lo[i]) / w : 0.0);
        }
        for (std::size_t i = 0; i < r; ++i) idx = idx * grid + bin(s.mu2[k][i]);
        ++rep.hits[idx];
    }
    std::size_t circle_cells = rep.cells / box;
    for (std::size_t cell = 0; cell < rep.cells; ++cell) {
        if (!inside[cell / circle_cells]) continue;
        ++rep.counted;
        if (rep.hits[cell] > 0) {
            ++rep.hit;
        } else if (rep.witnesses.size() < 10) {
            rep.witnesses.push_back(cell);
        }
    }
    rep.fraction = rep.counted ? static_cast<double>(rep.hit) / static_cast<double>(rep.counted) : 0.0;
    return rep;
}

bool ExtremumReport::ok() const {
    for (std::size_t i = 0; i < covector_nonzero.size(); ++i)
        if (!covector_nonzero[i] || has_extremum[i]) return false;
    return true;
}

ExtremumReport no_local_extremum_check(const geom::ProductManifold& m, const std::vector<CircleComponent>& components,
                                       std::size_t grid) {
    if (grid == 0) throw std::invalid_argument("extremum grid must be positive");
    const std::size_t td = m.torus_dim();
    std::size_t total = 1;
    for (std::size_t i = 0; i < td; ++i) total *= grid;
    ExtremumReport rep;
    for (const auto& comp : components) {
        rep.covector_nonzero.push_back(
            std::any_of(comp.covector.begin(), comp.covector.end(), [](const Integer& z) { return sgn(z) != 0; }));
        bool extremum = false;
        Point x(m.dimension(), 0.0);
        for (std::size_t cell = 0; cell < total && !extremum; ++cell) {
            for (std::size_t i = td, rest = cell; i-- > 0; rest /= grid)
                x[i] = static_cast<double>(rest % grid) / static_cast<double>(grid);
            const double at = comp.raw(m, x);
            bool up = true, down = true;
            for (std::size_t i = 0; i < td; ++i)
                for (double step : {-1.0, 1.0}) {
                    Point y = x;
                    y[i] += step / static_cast<double>(grid);
                    double d = comp.raw(m, y) - at;
                    d -= std::round(d);
                    if (d < 0.0) up = false;
                    if (d > 0.0) down = false;
                }
            extremum = up || down;
        }
        rep.has_extremum.push_back(extremum);
    }
    return rep;
}

ExtremumReport no_local_extremum_check(const GeneralizedMoment& mu, std::size_t grid) {
    return no_local_extremum_check(mu.omega_prime, mu.mu2, grid);
}

BettiReport betti_bound_check(const GeneralizedMoment& mu) {
    const auto p = hamclass::combination_periods(hamclass::period_matrix(mu.omega_prime, mu.action),
                                                 mu.classification.complement);
    BettiReport rep;
    rep.r = mu.r();
    rep.b1 = mu.omega_prime.b1();
    rep.rank = p.exact ? ratlin::rank(p.exact_values) : hamclass::classify_action(p).r;
    if (rep.rank < rep.r)
        throw ConvexError(ConvexError::Kind::PreconditionViolated,
                          "a combination of complement generators is Hamiltonian");
    return rep;
}

CycleLift cycle_lift(const GeneralizedMoment& mu, const Vec& c, const Vec& s, std::size_t checks) {
    const geom::ProductManifold& m = mu.omega_prime;
    const std::size_t r = mu.r(), td = m.torus_dim();
    if (r == 0) throw ConvexError(ConvexError::Kind::PreconditionViolated, "no circle components to lift");
    if (c.size() != mu.c() || s.size() != r - 1) throw std::invalid_argument("cycle_lift: target has the wrong length");

    // Direction: integer kernel of the frozen covectors, then minimal |<c_r, u>| by extended gcd.
    ratlin::IntMatrix frozen(r - 1, td);
    for (std::size_t i = 0; i + 1 < r; ++i)
        for (std::size_t k = 0; k < td; ++k) frozen(i, k) = mu.mu2[i].covector[k];
    const ratlin::IntMatrix kernel = ratlin::integer_kernel_basis(frozen);
    const IntVector& last = mu.mu2[r - 1].covector;
    IntVector u(td, Integer(0));
    Integer g(0);
    for (std::size_t b = 0; b < kernel.rows(); ++b) {
        Integer v(0);
        for (std::size_t k = 0; k < td; ++k) v += last[k] * kernel(b, k);
        if (sgn(v) == 0) continue;
        const auto e = ratlin::extended_gcd(g, v);
        for (std::size_t k = 0; k < td; ++k) u[k] = e.x * u[k] + e.y * kernel(b, k);
        g = e.g;
    }
    if (sgn(g) == 0) throw ConvexError(ConvexError::Kind::NoIntegerDirection, "no integer direction moves the last component");
    Integer k = g;
    const auto lead = std::find_if(u.begin(), u.end(), [](const Integer& z) { return sgn(z) != 0; });
    if (lead != u.end() && sgn(*lead) < 0) {
        for (auto& z : u) z = -z;
        k = -k;
    }

    // Preimage: minimum-norm heights for mu1, then minimum-norm torus coordinates.
    Point base = mu.basepoint;
    if (mu.c() > 0) {
        std::vector<Vec> slopes;
        for (const auto& h : mu.mu1) slopes.push_back(h.sphere_slopes);
        const Vec heights = min_norm_solve(slopes, c);
        for (std::size_t f = 0; f < m.sphere_count(); ++f) {
            if (std::abs(heights[f]) > 1.0 + 1e-12)
                throw ConvexError(ConvexError::Kind::NotInImage, "target is outside the moment polytope");
            base[m.height_index(f)] = std::clamp(heights[f], -1.0, 1.0);
        }
    }
    if (r > 1) {
        std::vector<Vec> rows;
        Vec rhs;
        for (std::size_t i = 0; i + 1 < r; ++i) {
            Vec row;
            for (const auto& z : mu.mu2[i].covector) row.push_back(z.get_d());
            rows.push_back(row);
            Point sphere_only = base;
            for (std::size_t q = 0; q < td; ++q) sphere_only[q] = mu.basepoint[q];
            rhs.push_back(s[i] - mu.mu2[i].raw(m, sphere_only));
        }
        const Vec x = min_norm_solve(rows, rhs);
        for (std::size_t q = 0; q < td; ++q) base[q] = geom::wrap01(mu.basepoint[q] + x[q]);
    }

    CycleLift lift;
    lift.u = u;
    lift.k = k;
    lift.base = base;
    std::vector<std::int64_t> dir;
    for (const auto& z : u) dir.push_back(z.get_si());
    lift.loop = geom::Loop::torus(Vec(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(td)), dir);

    for (std::size_t j = 0; j <= checks; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(checks);
        Point y = base;
        for (std::size_t q = 0; q < td; ++q) y[q] += t * u[q].get_d();
        for (std::size_t i = 0; i < mu.c(); ++i)
            lift.max_frozen_deviation = std::max(lift.max_frozen_deviation, std::abs(mu.mu1[i](m, y) - c[i]));
        for (std::size_t i = 0; i + 1 < r; ++i)
            lift.max_frozen_deviation =
                std::max(lift.max_frozen_deviation, geom::circle_distance(mu.mu2[i].raw(m, y), s[i]));
    }
    Point end = base;
    for (std::size_t q = 0; q < td; ++q) end[q] += u[q].get_d();
    const double winding = mu.mu2[r - 1].raw(m, end) - mu.mu2[r - 1].raw(m, base);
    lift.measured_winding = Integer(static_cast<long>(std::lround(winding)));
    lift.winding_integral = std::abs(winding - std::round(winding)) <= 1e-9;
    return lift;
}

}  // namespace momentforge::convex
