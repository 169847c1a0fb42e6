#pragma once

/**
 * @file convex.hpp
 * @brief Moment images: sampling, convex hulls, product coverage, openness
 * proxies, the Betti bound and cycle lifting.
 */

#include "momentforge/moment.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace momentforge::convex {

using geom::Point;
using moment::CircleComponent;
using moment::GeneralizedMoment;
using ratlin::Integer;
using ratlin::IntVector;

using Vec = std::vector<double>;

class ConvexError : public std::runtime_error {
public:
    enum class Kind { PreconditionViolated, NoIntegerDirection, NotInImage };
    ConvexError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct ImageSample {
    std::vector<Point> preimages;
    std::vector<Vec> mu1;
    std::vector<Vec> mu2;
};

ImageSample moment_image_sample(const GeneralizedMoment& mu, std::size_t n, std::uint64_t seed);

/// Convex hull in R^d, d <= 3.  Degenerate point sets are handled in their
/// affine hull, so `rank` may be smaller than `ambient`.
class MomentPolytope {
public:
    std::size_t ambient() const { return ambient_; }
    std::size_t rank() const { return basis_.size(); }
    /// Hull vertices; counter-clockwise in the plane case.
    const std::vector<Vec>& vertices() const { return vertices_; }
    bool contains(const Vec& x, double tol = 1e-12) const;
    /// Axis-aligned bounds of the vertices.
    Vec lower() const;
    Vec upper() const;

    friend MomentPolytope convex_hull(const std::vector<Vec>& points, std::size_t dim, double tol);

private:
    struct Facet {
        Vec normal;  ///< unit, outward, in affine-hull coordinates
        double offset = 0.0;
    };
    std::size_t ambient_ = 0;
    Vec origin_;
    std::vector<Vec> basis_;  ///< orthonormal basis of the affine hull
    std::vector<Vec> vertices_;
    std::vector<Facet> facets_;
    double lo_ = 0.0, hi_ = 0.0;  ///< rank-1 interval in hull coordinates

    Vec local(const Vec& x) const;
};

/// `tol` is relative to the largest coordinate magnitude (at least 1).
MomentPolytope convex_hull(const std::vector<Vec>& points, std::size_t dim, double tol = 1e-10);

/// Hull of mu1 over all pole combinations; mu1 is affine in the heights.
MomentPolytope moment_polytope(const GeneralizedMoment& mu);

struct CoverageReport {
    std::size_t grid = 0;
    std::size_t samples = 0;
    std::size_t cells = 0;    ///< grid^(c + r)
    std::size_t counted = 0;  ///< cells inside Delta x (S^1)^r
    std::size_t hit = 0;      ///< counted cells with at least one sample
    double fraction = 0.0;
    std::vector<std::size_t> hits;       ///< per cell, row-major, mu1 coordinates first
    std::vector<std::size_t> witnesses;  ///< first empty counted cells
};

CoverageReport product_coverage_check(const GeneralizedMoment& mu, std::size_t grid, std::size_t n, std::uint64_t seed);

struct ExtremumReport {
    std::vector<bool> covector_nonzero;
    std::vector<bool> has_extremum;
    bool ok() const;
};

/// Weak discrete extremum test of each component on a grid of the torus factor
/// (spheres at the equator).
ExtremumReport no_local_extremum_check(const geom::ProductManifold& m, const std::vector<CircleComponent>& components,
                                       std::size_t grid);
ExtremumReport no_local_extremum_check(const GeneralizedMoment& mu, std::size_t grid);

struct BettiReport {
    std::size_t rank = 0;
    std::size_t r = 0;
    std::size_t b1 = 0;
    bool ok() const { return rank == r && r <= b1; }
};

/// Throws PreconditionViolated when some complement combination is Hamiltonian.
BettiReport betti_bound_check(const GeneralizedMoment& mu);

struct CycleLift {
    IntVector u;          ///< torus direction of the loop
    Integer k;            ///< <c_r, u>
    Point base;           ///< preimage of the target
    geom::Loop loop;
    double max_frozen_deviation = 0.0;
    Integer measured_winding;
    bool winding_integral = false;
    bool ok() const { return max_frozen_deviation < 1e-9 && winding_integral && measured_winding == k; }
};

/// Loop through a preimage of (c, s_1, ..., s_{r-1}) on which the first r - 1
/// circle components and mu1 stay fixed and the last winds k times, |k| minimal.
CycleLift cycle_lift(const GeneralizedMoment& mu, const Vec& c, const Vec& s, std::size_t checks = 1000);

}  // namespace momentforge::convex
