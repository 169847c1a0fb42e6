#pragma once

/**
 * @file moment.hpp
 * @brief Generalized moment maps: a real moment map for the Hamiltonian
 * subtorus and circle-valued components for the complementary subtorus, all
 * against one integral form.
 *
 * Components are reported relative to the basepoint (torus origin, every
 * sphere at its south pole).  The real part is centered: on a sphere of
 * coefficient c rotated at speed s it is sign * c * s * h.
 */

#include "momentforge/geom.hpp"
#include "momentforge/hamclass.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace momentforge::moment {

using geom::ActionSpec;
using geom::Point;
using geom::ProductManifold;
using hamclass::ActionClassification;
using ratlin::Integer;
using ratlin::IntMatrix;
using ratlin::IntVector;

inline constexpr double kCircleTolerance = 1e-9;

class MomentError : public std::runtime_error {
public:
    enum class Kind { NoHamiltonianPart, GeneratorIsHamiltonian, NonIntegralForm, ZeroCovector, NotAFixedPoint };
    MomentError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// A point of R/Z.
struct CircleValue {
    double representative = 0.0;  ///< in [0, 1)

    static CircleValue of(double x) { return {geom::wrap01(x)}; }
    double distance(const CircleValue& o) const { return geom::circle_distance(representative, o.representative); }
    bool approx_equal(const CircleValue& o, double tol = kCircleTolerance) const { return distance(o) <= tol; }
};

/// mu1 along one Hamiltonian direction: sum_f slope_f * h_f.
struct HamiltonianComponent {
    IntVector combination;             ///< coefficients over the action's generators
    std::vector<double> sphere_slopes; ///< sign * c_f * speed_f
    double operator()(const ProductManifold& m, const Point& x) const;
};

/// Circle-valued component of a non-Hamiltonian circle generator.
struct CircleComponent {
    IntVector combination;
    geom::VectorField field;
    IntVector covector;                ///< i_X omega' on the torus factor
    std::vector<double> sphere_slopes; ///< exact sphere part, relative to the basepoint heights
    Point basepoint;

    /// Closed form, unreduced: <c, x - x~> + sum_f slope_f (h_f - h~_f).
    double raw(const ProductManifold& m, const Point& x) const;
    CircleValue operator()(const ProductManifold& m, const Point& x) const { return CircleValue::of(raw(m, x)); }
    /// Integral of i_X omega' along the straight path from the basepoint to x in the universal cover.
    double path_integral(const ProductManifold& m, const Point& x) const;
    double path_integral(const ProductManifold& m, const geom::Path& p) const;
};

struct MomentValue {
    std::vector<double> mu1;
    std::vector<double> mu2;  ///< representatives in [0, 1)
};

struct GeneralizedMoment {
    ProductManifold omega_prime;
    ActionSpec action;
    ActionClassification classification;
    Point basepoint;
    std::vector<HamiltonianComponent> mu1;
    std::vector<CircleComponent> mu2;

    std::size_t c() const { return mu1.size(); }
    std::size_t r() const { return mu2.size(); }
    MomentValue operator()(const Point& x) const;
};

/// Torus origin, south poles.
Point default_basepoint(const ProductManifold& m);

HamiltonianComponent hamiltonian_component(const ProductManifold& omega_prime, const ActionSpec& a,
                                           const IntVector& combination);
/// One component per Hamiltonian lattice generator; throws NoHamiltonianPart when c = 0.
std::vector<HamiltonianComponent> hamiltonian_components(const ProductManifold& omega_prime, const ActionSpec& a,
                                                         const ActionClassification& cls);

/// Requires an exact form whose torus pairings with the generator are integral.
CircleComponent mcduff_component(const ProductManifold& omega_prime, const ActionSpec& a, const IntVector& eta,
                                 const Point& basepoint);

GeneralizedMoment generalized_moment(const ProductManifold& omega_prime, const ActionSpec& a,
                                     const ActionClassification& cls);

struct PathIndependenceReport {
    double direct = 0.0;
    double detour = 0.0;
    double difference = 0.0;  ///< detour - direct
    bool integral = false;
    bool equal_mod_one = false;
    bool ok() const { return integral && equal_mod_one; }
};

/// Compares the straight path x~ -> x with x~ -> x~ + d -> x + d, which ends at
/// another lift of x.
PathIndependenceReport path_independence_check(const ProductManifold& m, const CircleComponent& mu, const Point& x,
                                               const std::vector<std::int64_t>& loop);

struct FiberFactorization {
    Integer d;
    IntVector reduced;
};

FiberFactorization fiber_connected_factorization(const IntVector& covector);

/// Weights of the linearized action, one covector over the action's generators
/// per symplectic plane (torus planes first, then spheres).  Circles have
/// period 1, so in the Darboux chart mu1 = mu1(p) + pi * sum_k <alpha_k, xi> |z_k|^2.
struct FixedPointLocalData {
    Point p;
    std::vector<IntVector> weights;
};

FixedPointLocalData local_weights(const ProductManifold& m, const ActionSpec& a, const Point& p);

struct LocalModelReport {
    double max_residual = 0.0;
    std::vector<std::vector<double>> fitted_weights;  ///< [component][plane], fit coefficient / pi
    std::vector<bool> minimizes;                      ///< per Hamiltonian component
    bool minimum_weights_nonnegative = true;
    bool circle_extremum = false;
    bool ok(double tol) const { return max_residual < tol && minimum_weights_nonnegative && !circle_extremum; }
};

/// Least-squares fit of mu1 to a + sum_k b_k |z_k|^2 on a grid of radius `radius`
/// in each Darboux plane at p.
LocalModelReport local_model_check(const GeneralizedMoment& mu, const Point& p, double radius);

}  // namespace momentforge::moment
