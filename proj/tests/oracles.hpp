#pragma once

// Brute-force references shared by the unit suites and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace oracles {

inline double wrapped(double x) { return x - std::round(x); }

// Connected components of the discretized fiber <c, x> = t0 mod 1 on a
// periodic n x n grid, 8-connectivity.
inline int fiber_components(long c1, long c2, int n, double t0) {
    const double band = 0.6 * static_cast<double>(std::labs(c1) + std::labs(c2)) / n;
    std::vector<char> in(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = (i + 0.5) / n, y = (j + 0.5) / n;
            in[static_cast<std::size_t>(i) * n + j] = std::abs(wrapped(c1 * x + c2 * y - t0)) < band;
        }
    std::vector<int> label(in.size(), -1);
    int count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < in.size(); ++s) {
        if (!in[s] || label[s] >= 0) continue;
        label[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            const int i = static_cast<int>(cur / n), j = static_cast<int>(cur % n);
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int a = (i + di + n) % n, b = (j + dj + n) % n;
                    const std::size_t nb = static_cast<std::size_t>(a) * n + b;
                    if (in[nb] && label[nb] < 0) {
                        label[nb] = count;
                        stack.push_back(nb);
                    }
                }
        }
        ++count;
    }
    return count;
}

// Best p/q with q <= d by scanning every denominator; ties to the smaller q.
struct Fraction {
    long p = 0, q = 1;
};

inline Fraction scan_best(double x, long d) {
    Fraction best;
    double err = INFINITY;
    for (long q = 1; q <= d; ++q) {
        const long p = std::lround(x * static_cast<double>(q));
        const double e = std::abs(x - static_cast<double>(p) / static_cast<double>(q));
        if (e < err - 1e-15) {
            err = e;
            best = {p, q};
        }
    }
    return best;
}

// Central difference of f along coordinate i.
template <typename F>
double central_difference(F&& f, std::vector<double> x, std::size_t i, double h) {
    std::vector<double> lo = x, hi = x;
    lo[i] -= h;
    hi[i] += h;
    return (f(hi) - f(lo)) / (2.0 * h);
}

}  // namespace oracles
