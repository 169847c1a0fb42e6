#pragma once

/**
 * @file quadrature.hpp
 * @brief Adaptive Simpson quadrature on an interval.
 */

#include <cmath>
#include <cstddef>

namespace momentforge::quad {

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kDefaultMaxEvaluations = std::size_t{1} << 20;

struct QuadratureResult {
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

template <typename F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm, double whole,
                    double tol, int depth, QuadratureResult& out, std::size_t max_evals) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    out.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || out.evaluations >= max_evals) {
        out.converged = out.converged && std::abs(delta) <= 15.0 * tol;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, out, max_evals) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, out, max_evals);
}

}  // namespace detail

/// Integrates f over [a, b] to absolute tolerance `tol`, stopping refinement
/// once `max_evals` integrand evaluations have been spent.
template <typename F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double tol = kDefaultTolerance,
                                  std::size_t max_evals = kDefaultMaxEvaluations) {
    QuadratureResult out;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    out.evaluations = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    out.value = detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 50, out, max_evals);
    return out;
}

}  // namespace momentforge::quad
