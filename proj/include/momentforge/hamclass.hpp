#pragma once

/**
 * @file hamclass.hpp
 * @brief Period matrices, the Hamiltonian / non-Hamiltonian splitting of the
 * acting torus, and integralization of the symplectic form.
 */

#include "momentforge/geom.hpp"
#include "momentforge/ratlin.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace momentforge::hamclass {

using geom::ActionSpec;
using geom::ProductManifold;
using geom::TwoCycle;
using ratlin::Integer;
using ratlin::IntMatrix;
using ratlin::IntVector;
using ratlin::Rational;
using ratlin::RatMatrix;
using ratlin::RatVector;
using RealMatrix = ratlin::Matrix<double>;

/// Relative tolerance for rank decisions on real-valued period matrices.
inline constexpr double kRealRankTolerance = 1e-9;

/// P_jk = integral over the k-th torus loop of i_{X_j} omega.
struct PeriodMatrix {
    bool exact = true;
    RatMatrix exact_values;  ///< filled when exact
    RealMatrix values;       ///< always filled

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
};

struct ActionClassification {
    IntMatrix hamiltonian;  ///< c x n lattice basis (saturated, Hermite form)
    IntMatrix complement;   ///< r x n integer generators of a complementary subtorus
    std::size_t c = 0;
    std::size_t r = 0;

    std::size_t total() const { return c + r; }
    friend bool operator==(const ActionClassification&, const ActionClassification&) = default;
};

PeriodMatrix period_matrix(const ProductManifold& m, const ActionSpec& a);
/// Rows coefficients * P.
PeriodMatrix combination_periods(const PeriodMatrix& p, const IntMatrix& coefficients);

ActionClassification classify_action(const PeriodMatrix& p);

/// Lattice of integer vectors in the rational span of the rows.
IntMatrix saturate(const IntMatrix& rows, std::size_t n);

class IntegralizationError : public std::runtime_error {
public:
    enum class Kind { RoundingBrokeNondegeneracy, RoundingBrokeConditionB, Exhausted };
    IntegralizationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct IntegralizationResult {
    ProductManifold omega_prime;
    Integer k;
    RatVector q;                 ///< coefficients of omega'' in the form basis
    std::vector<double> a;       ///< coefficients of omega in the form basis
    double max_deviation = 0.0;  ///< max |q_i - a_i|
    Integer max_denominator;     ///< bound used by the successful attempt
    std::size_t attempts = 0;
};

/// Classes dual to the 2-cycles of geom::homology_bases: dx_i ^ dx_j and the
/// unit-area sphere classes.
std::vector<TwoCycle> form_basis(const ProductManifold& m);
/// Coefficients of the form of m in form_basis(m).
std::vector<geom::Coefficient> form_coefficients(const ProductManifold& m);
/// Manifold with the same factors and form sum_i q_i omega_i.
ProductManifold with_form(const ProductManifold& m, const RatVector& q);

/// Integer matrix of periods over (loop, Hamiltonian generator) rows and form
/// basis columns.  A rational form with coefficients in its kernel keeps the
/// Hamiltonian generators exact.
IntMatrix exactness_constraints(const ProductManifold& m, const ActionSpec& a,
                                const ActionClassification& cls);

/// One attempt at a fixed denominator bound.  Coordinates that are already
/// exact are kept.
IntegralizationResult integralize_once(const ProductManifold& m, const ActionSpec& a, const Integer& max_denominator);

/// Doubles the denominator bound after each failed attempt up to `limit`.
IntegralizationResult integralize_form(const ProductManifold& m, const ActionSpec& a, const Integer& max_denominator,
                                       const Integer& limit = Integer(1) << 16);

}  // namespace momentforge::hamclass
