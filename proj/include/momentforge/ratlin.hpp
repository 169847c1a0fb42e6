#pragma once

/**
 * @file ratlin.hpp
 * @brief Exact integer and rational linear algebra.
 *
 * Everything in this header is exact: integers are arbitrary precision (GMP)
 * and rationals are kept in lowest terms with a positive denominator.
 * Elimination is fraction-free (Bareiss style); rows are divided by their
 * content after every step so entries stay small.
 */

#include <gmpxx.h>

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace momentforge::ratlin {

using Integer = mpz_class;

class Rational {
public:
    Rational() : value_(0) {}
    Rational(long n) : value_(n) {}                          // NOLINT(google-explicit-constructor)
    Rational(int n) : value_(n) {}                           // NOLINT(google-explicit-constructor)
    Rational(const Integer& n) : value_(n) {}                // NOLINT(google-explicit-constructor)
    Rational(const Integer& num, const Integer& den);

    /// Exact value of a finite double (every double is a dyadic rational).
    static Rational from_double(double x);
    /// Parses "p", "-p" or "p/q".
    static Rational parse(std::string_view text);

    Integer numerator() const { return value_.get_num(); }
    Integer denominator() const { return value_.get_den(); }
    double to_double() const { return value_.get_d(); }
    bool is_zero() const { return sgn(value_) == 0; }
    bool is_integer() const { return value_.get_den() == 1; }
    int sign() const { return sgn(value_); }
    std::string str() const { return value_.get_str(); }

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) < 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    const mpq_class& raw() const { return value_; }

private:
    explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }
    mpq_class value_;
};

Rational abs(const Rational& x);
std::ostream& operator<<(std::ostream& os, const Rational& x);

/// Dense row-major matrix.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix: entry count != rows * cols");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<T>& data() const { return data_; }

    std::vector<T> row(std::size_t i) const {
        return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                              data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == T(0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
    std::vector<T> y(a.rows(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

RatMatrix to_rational(const IntMatrix& m);
IntMatrix int_matrix(std::size_t rows, std::size_t cols, const std::vector<long>& entries);
RatMatrix rat_matrix(std::size_t rows, std::size_t cols, const std::vector<Rational>& entries);

Integer lcm_of_denominators(const RatVector& v);
/// Scales a rational vector to the primitive integer vector on the same ray.
IntVector primitive_integer_vector(const RatVector& v);
Integer content(const IntVector& v);

/// Basis of {x : m x = 0}; the free coordinates of each basis vector form an identity block.
std::vector<RatVector> rat_kernel_basis(const RatMatrix& m);
/// Reduced row echelon form and pivot columns.
struct EchelonForm {
    RatMatrix rref;
    std::vector<std::size_t> pivots;
};
EchelonForm reduced_row_echelon(const RatMatrix& m);

std::size_t integer_rank(const IntMatrix& m);
std::size_t rank(const RatMatrix& m);
Integer determinant(const IntMatrix& m);
Rational determinant(const RatMatrix& m);

struct SmithForm {
    IntMatrix u;  ///< unimodular, rows x rows
    IntMatrix d;  ///< diagonal, d1 | d2 | ... >= 0
    IntMatrix v;  ///< unimodular, cols x cols
    std::size_t rank = 0;
    IntVector diagonal() const;
};
/// U * m * V = D.
SmithForm smith_normal_form(const IntMatrix& m);

/// Row-style Hermite normal form with zero rows dropped: pivots positive,
/// entries above each pivot reduced into [0, pivot).
IntMatrix hermite_normal_form(const IntMatrix& m);

/// Lattice basis (rows) of {x in Z^n : m x = 0}; always saturated.
IntMatrix integer_kernel_basis(const IntMatrix& m);

/// Inverse of a unimodular matrix; throws if |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& m);

/// Best rational approximation with denominator <= max_denominator.
/// Ties go to the smaller denominator.
Rational rational_round(double x, const Integer& max_denominator);
Rational rational_round(const Rational& x, const Integer& max_denominator);

/// Pfaffian by expansion along the first row; input must be antisymmetric of even order.
Rational pfaffian(const RatMatrix& m);

/// Floating-point Pfaffian by the same expansion, for real-valued forms.
double pfaffian(const Matrix<double>& m);

struct ExtendedGcd {
    Integer g, x, y;  ///< g = x a + y b, g >= 0
};
ExtendedGcd extended_gcd(const Integer& a, const Integer& b);

}  // namespace momentforge::ratlin
