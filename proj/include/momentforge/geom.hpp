#pragma once

/**
 * @file geom.hpp
 * @brief Closed symplectic manifolds built from a flat torus and round spheres.
 *
 * Coordinates of a point are laid out as
 *
 *     (x_1, ..., x_m, theta_1, h_1, ..., theta_k, h_k)
 *
 * with x in R^m / Z^m on the torus factor and, on each sphere, the cylindrical
 * coordinates theta in R / Z (period 1) and height h in [-1, 1].  The torus
 * carries the constant form u^T Omega v, each sphere the form c dtheta ^ dh,
 * so a sphere has total area 2c and its class is integral iff 2c is an integer.
 *
 * A torus action is given by integer data per generator: a translation
 * direction on the torus factor and a rotation speed on each sphere.  The
 * one-parameter subgroup exp(t eta) translates by t v and rotates theta by t s.
 */

#include "momentforge/ratlin.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace momentforge::geom {

using ratlin::Integer;
using ratlin::IntMatrix;
using ratlin::IntVector;
using ratlin::Rational;
using ratlin::RatMatrix;
using RealMatrix = ratlin::Matrix<double>;

using Point = std::vector<double>;
using Tangent = std::vector<double>;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A real coefficient that remembers its exact rational value when it has one.
class Coefficient {
public:
    Coefficient() : value_(0.0), exact_(Rational(0)) {}
    static Coefficient exact(const Rational& q) { return Coefficient(q.to_double(), q); }
    static Coefficient real(double x) { return Coefficient(x, std::nullopt); }
    /// "3", "-7/5" are exact; anything with a decimal point or exponent is real.
    static Coefficient parse(std::string_view text);

    double value() const { return value_; }
    bool is_exact() const { return exact_.has_value(); }
    const Rational& rational() const;
    std::string str() const;

    Coefficient operator-() const;
    friend bool operator==(const Coefficient& a, const Coefficient& b);

private:
    Coefficient(double v, std::optional<Rational> q) : value_(v), exact_(std::move(q)) {}
    double value_;
    std::optional<Rational> exact_;
};

enum class SignConvention { Plus, Minus };

/// +1 for the convention X = +v, -1 for X = d/dt exp(-t xi).x
inline int sign_factor(SignConvention s) { return s == SignConvention::Plus ? 1 : -1; }
std::string_view to_string(SignConvention s);
SignConvention parse_sign_convention(std::string_view text);

class FlatTorusFactor {
public:
    /// omega is the full m x m antisymmetric matrix, row-major.
    FlatTorusFactor(std::size_t dim, std::vector<Coefficient> omega);

    std::size_t dim() const { return dim_; }
    const Coefficient& omega(std::size_t i, std::size_t j) const { return omega_[i * dim_ + j]; }
    bool is_exact() const;
    RealMatrix real_omega() const;
    RatMatrix exact_omega() const;  ///< throws if any entry is real

private:
    std::size_t dim_;
    std::vector<Coefficient> omega_;
};

class SphereFactor {
public:
    explicit SphereFactor(Coefficient area_coefficient);
    const Coefficient& area_coefficient() const { return c_; }

private:
    Coefficient c_;
};

class ProductManifold {
public:
    ProductManifold(std::optional<FlatTorusFactor> torus, std::vector<SphereFactor> spheres);

    const std::optional<FlatTorusFactor>& torus() const { return torus_; }
    const std::vector<SphereFactor>& spheres() const { return spheres_; }

    std::size_t torus_dim() const { return torus_ ? torus_->dim() : 0; }
    std::size_t sphere_count() const { return spheres_.size(); }
    std::size_t dimension() const { return torus_dim() + 2 * sphere_count(); }
    std::size_t b1() const { return torus_dim(); }
    std::size_t theta_index(std::size_t sphere) const { return torus_dim() + 2 * sphere; }
    std::size_t height_index(std::size_t sphere) const { return torus_dim() + 2 * sphere + 1; }

    /// True when every form coefficient is an exact rational.
    bool is_exact() const;
    double sphere_coefficient(std::size_t f) const { return spheres_.at(f).area_coefficient().value(); }

    std::string describe() const;

private:
    std::optional<FlatTorusFactor> torus_;
    std::vector<SphereFactor> spheres_;
};

struct Generator {
    std::vector<std::int64_t> translation;  ///< length torus_dim
    std::vector<std::int64_t> speeds;       ///< length sphere_count
};

class ActionSpec {
public:
    ActionSpec(const ProductManifold& m, std::vector<Generator> generators,
               SignConvention sign = SignConvention::Plus);

    std::size_t size() const { return generators_.size(); }
    const Generator& generator(std::size_t j) const { return generators_.at(j); }
    const std::vector<Generator>& generators() const { return generators_; }
    SignConvention sign() const { return sign_; }
    ActionSpec with_sign(SignConvention s) const;

    /// Rows (v_j | s_j,.) for every generator.
    IntMatrix combined_matrix() const;
    /// Rows v_j only.
    IntMatrix translation_matrix() const;
    /// Trivial kernel: the combined matrix has Smith form with all diagonal entries 1.
    bool effective() const;

private:
    std::vector<Generator> generators_;
    std::size_t torus_dim_;
    std::size_t sphere_count_;
    SignConvention sign_;
};

/// Fundamental field of an integer combination of generators.  Constant on the
/// torus factor, a rotation field sign * s d/dtheta on each sphere.
struct VectorField {
    int sign = 1;
    IntVector translation;
    IntVector speeds;

    Tangent at(const ProductManifold& m, const Point& x) const;
    bool is_zero() const;
};

VectorField fundamental_field(const ProductManifold& m, const ActionSpec& a, std::size_t j);
VectorField combination_field(const ProductManifold& m, const ActionSpec& a, const IntVector& coefficients);

/// Euclidean length of X(x) in the product of the flat unit torus and unit
/// spheres; vanishes exactly at the zeros of the field.
double field_norm(const ProductManifold& m, const VectorField& field, const Point& x);

/// omega_x(u, w), factor by factor.
double pairing_eval(const ProductManifold& m, const Tangent& u, const Tangent& w, const Point& x);

/// Omega(u, w) on integer torus vectors, exact.  Requires an exact torus form.
Rational exact_torus_pairing(const ProductManifold& m, const IntVector& u, const IntVector& w);

/// Piecewise straight path in the universal cover (theta unwrapped, h in [-1, 1]).
struct Path {
    std::vector<Point> vertices;
};

struct Loop {
    enum class Kind { Torus, Latitude };
    Kind kind = Kind::Torus;
    std::size_t sphere = 0;               ///< latitude loops
    double height = 0.0;                  ///< latitude loops
    std::int64_t winding = 1;             ///< latitude loops
    std::vector<double> base;             ///< torus loops: basepoint in [0,1)^m
    std::vector<std::int64_t> direction;  ///< torus loops

    static Loop torus(std::vector<double> base, std::vector<std::int64_t> direction);
    static Loop latitude(std::size_t sphere, double height, std::int64_t winding = 1);
    /// Full-dimensional path traversing the loop, other coordinates at `rest`.
    Path as_path(const ProductManifold& m, const Point& rest) const;
};

struct TwoCycle {
    enum class Kind { TorusPlane, Sphere };
    Kind kind = Kind::TorusPlane;
    std::size_t i = 0, j = 1;  ///< torus plane T_ij, i < j
    std::size_t sphere = 0;
    std::string label() const;
};

struct HomologyBases {
    std::vector<Loop> loops;
    std::vector<TwoCycle> cycles;
};

HomologyBases homology_bases(const ProductManifold& m);

/// Throws GeometryError when the path does not close up on M.
void require_closed(const ProductManifold& m, const Path& p);

/// Integral of i_X omega along a path: closed form on the torus block,
/// adaptive Simpson on the sphere blocks.
double integrate_oneform_along_path(const ProductManifold& m, const VectorField& field, const Path& p);
/// Same integral by adaptive Simpson of the full integrand omega(X(c(t)), c'(t)).
double quadrature_oneform_along_path(const ProductManifold& m, const VectorField& field, const Path& p);

/// Integral of i_X omega over a closed loop.
double integrate_oneform_over_loop(const ProductManifold& m, const VectorField& field, const Loop& loop);
/// Exact period over a torus loop; requires an exact form.
Rational exact_loop_period(const ProductManifold& m, const VectorField& field, const Loop& loop);

/// Omega_ij on T_ij, 2c on a sphere; exact when the coefficient is.
Coefficient integrate_twoform_over_cycle(const ProductManifold& m, const TwoCycle& s);

struct FixedPointSet {
    enum class Locus { Whole, Poles };
    bool empty = true;
    bool has_torus = false;            ///< torus factor present (and pointwise fixed)
    std::vector<Locus> sphere_locus;   ///< per sphere
    bool finite() const;
    /// Number of points when finite.
    std::size_t count() const;
    /// One point per pole combination; torus coordinates at the origin and
    /// unrotated spheres at the south pole.
    std::vector<Point> representatives(const ProductManifold& m) const;
    std::string describe() const;
};

FixedPointSet fixed_point_set(const ProductManifold& m, const ActionSpec& a);

/// Seeded uniform samples (uniform for the symplectic volume).
std::vector<Point> sample_points(const ProductManifold& m, std::size_t n, std::uint64_t seed);

/// Action of exp(sum_j t_j eta_j) on x; the result is reduced mod 1.
Point act(const ProductManifold& m, const ActionSpec& a, std::span<const double> t, const Point& x);

/// Local chart in which omega is the standard form on each plane.  `plane`
/// holds (x, y) for each of the dim/2 planes: consecutive torus coordinates,
/// then one plane per sphere.  At a pole the sphere plane is the polar
/// Darboux chart with h = -1 + pi (x^2 + y^2) / c (south) or
/// h = 1 - pi (x^2 + y^2) / c (north).
Point darboux_chart(const ProductManifold& m, const Point& center, std::span<const double> plane);

double wrap01(double x);
/// Distance on R/Z.
double circle_distance(double a, double b);

}  // namespace momentforge::geom
