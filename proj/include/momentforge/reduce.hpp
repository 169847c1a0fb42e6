#pragma once

/**
 * @file reduce.hpp
 * @brief Symplectic reduction by circles that rotate single spheres.
 *
 * A reduced generator has no torus part and rotates exactly one sphere at
 * speed +-1.  At an interior level its level set is a latitude circle times the
 * remaining factors, and the quotient simply deletes that sphere.
 */

#include "momentforge/moment.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace momentforge::reduce {

using geom::ActionSpec;
using geom::Point;
using geom::ProductManifold;
using moment::GeneralizedMoment;

class ReductionError : public std::runtime_error {
public:
    enum class Kind { NotRegular, NotFree, NotInvariantOnOrbits };
    ReductionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct ReductionProblem {
    GeneralizedMoment moment;
    std::vector<std::size_t> generators;  ///< indices into moment.action
    std::vector<double> levels;           ///< value of each generator's own moment map

    /// Throws std::invalid_argument unless every reduced generator has zero
    /// translation and rotates exactly one sphere, distinct per generator.
    void validate() const;
    /// Sphere rotated by the k-th reduced generator.
    std::size_t sphere_of(std::size_t k) const;
};

struct RegularValueVerdict {
    enum class Status { Regular, Critical, OutsideImage };
    std::vector<Status> status;  ///< per reduced generator
    std::vector<double> heights; ///< level height on the rotated sphere
    std::vector<Point> witnesses;          ///< pole points for critical levels
    std::vector<double> witness_gradient;  ///< finite-difference |d mu| at each witness
    bool regular() const;
};

RegularValueVerdict regular_value_check(const ReductionProblem& p);

struct ReducedSpace {
    ReductionProblem problem;
    ProductManifold manifold;
    ActionSpec action;
    std::vector<std::size_t> kept_generators;  ///< original index of each residual generator
    std::vector<std::size_t> kept_spheres;     ///< original index of each remaining sphere
    std::vector<double> heights;               ///< level heights of the deleted spheres, by reduced generator

    /// A point of the level set over y; deleted spheres at angle `theta`.
    Point lift(const Point& y, const std::vector<double>& theta) const;
};

ReducedSpace reduce_at(const ReductionProblem& p);

/// Largest variation of f over the collapsed orbits above n sampled points of the reduced space.
double collapsed_orbit_variation(const ReducedSpace& red, const std::function<double(const Point&)>& f,
                                 std::size_t n, std::uint64_t seed);

struct InducedMoment {
    GeneralizedMoment moment;
    double orbit_variation = 0.0;  ///< worst variation of the original components on collapsed orbits
    double restriction_error = 0.0;  ///< worst deviation from the restricted original, up to constants
};

/// Moment of the residual action against the inherited form, verified against
/// the original components on lifts.
InducedMoment induced_moment(const ReducedSpace& red, std::size_t n = 1000, std::uint64_t seed = 0);

struct HeredityVerdict {
    bool vacuous = false;                ///< no non-Hamiltonian residual circle to begin with
    std::vector<double> residual_period; ///< largest |period| per residual generator on the reduced space
    bool non_hamiltonian = false;
    std::size_t bins = 0;
    std::vector<std::size_t> bins_hit;  ///< per induced circle component
    bool surjective = false;
    bool ok() const { return vacuous || (non_hamiltonian && surjective); }
    std::string summary() const;
};

HeredityVerdict heredity_check(const ReducedSpace& red, std::size_t bins = 50, std::size_t n = 10000,
                               std::uint64_t seed = 0);

}  // namespace momentforge::reduce
