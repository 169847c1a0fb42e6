#pragma once

/**
 * @file equiv.hpp
 * @brief The cocycle matrix Z, the affine action Aff^Z and equivariance checks.
 *
 * Z_ij is the period of i_{X_i} omega' over the orbit circle of the j-th
 * complement generator through the basepoint.  Aff^Z(s)(t)_i = t_i + sum_j Z_ij s_j.
 */

#include "momentforge/moment.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace momentforge::equiv {

using geom::ActionSpec;
using geom::Point;
using geom::ProductManifold;
using moment::GeneralizedMoment;
using ratlin::IntMatrix;

inline constexpr double kIntegralityTolerance = 1e-9;
inline constexpr double kPairingTolerance = 1e-12;

class CocycleError : public std::runtime_error {
public:
    enum class Kind { NonIntegerPeriod, NonzeroDiagonal };
    CocycleError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

IntMatrix cocycle_matrix(const ProductManifold& omega_prime, const ActionSpec& a, const IntMatrix& complement,
                         const Point& basepoint);
IntMatrix cocycle_matrix(const GeneralizedMoment& mu);

std::vector<double> affine_apply(const IntMatrix& z, const std::vector<double>& s, const std::vector<double>& t);
/// The multiplicative form, e.g. "(s2^1 t1, s1^-1 t2)".
std::string describe_affine(const IntMatrix& z);

/// Element of the complement subtorus as coefficients over the action's generators.
std::vector<double> complement_element(const IntMatrix& complement, const std::vector<double>& t);

struct EquivarianceReport {
    std::size_t samples = 0;
    double max_error = 0.0;      ///< circle distance between mu2(t.x) and Aff^Z(t) mu2(x)
    double max_mu1_error = 0.0;  ///< |mu1(t.x) - mu1(x)|
    bool ok(double tol) const { return max_error < tol && max_mu1_error < tol; }
};

/// Samples x and t in the complement subtorus.  With `via_paths` the circle
/// components are evaluated by path integration instead of the closed form.
EquivarianceReport equivariance_check(const GeneralizedMoment& mu, const IntMatrix& z, std::size_t n,
                                      std::uint64_t seed, bool via_paths = false);

struct IsotropyReport {
    double max_pairing = 0.0;  ///< max |omega'(X_i, X_j)| over points and pairs
    double spread = 0.0;       ///< max over pairs of the variation across points
    bool isotropic() const { return max_pairing < kPairingTolerance; }
    bool point_independent() const { return spread < kPairingTolerance; }
};

IsotropyReport isotropic_orbit_test(const ProductManifold& omega_prime, const ActionSpec& a,
                                    const std::vector<Point>& points);

struct NaturalEquivarianceVerdict {
    bool has_fixed_points = false;
    bool isotropic = false;
    bool z_zero = false;
    bool mu2_invariant = false;
    double invariance_error = 0.0;
    /// Fixed points force the other three; without them nothing is asserted.
    bool chain_holds() const { return !has_fixed_points || (isotropic && z_zero && mu2_invariant); }
};

NaturalEquivarianceVerdict natural_equivariance_test(const GeneralizedMoment& mu, std::size_t n, std::uint64_t seed);

struct LocalFreenessVerdict {
    std::size_t r = 0;
    std::size_t rank_z = 0;
    bool hypothesis = false;     ///< rank Z = r
    bool locally_free = false;   ///< finite stabilizers at every tested point
    std::string summary() const;
};

LocalFreenessVerdict local_freeness_check(const GeneralizedMoment& mu, const IntMatrix& z, std::size_t n,
                                          std::uint64_t seed);

}  // namespace momentforge::equiv
