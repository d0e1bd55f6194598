#pragma once

// Adaptive Simpson quadrature with a running error estimate.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace htrl {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // accumulated error estimate, not a strict bound
};

namespace detail {

template <typename F>
void adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth, QuadratureResult& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.error += std::fabs(delta) / 15.0;
        return;
    }
    adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance tol.
template <typename F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double tol = 1e-10,
                                  int max_depth = 60) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
    QuadratureResult out;
    if (a == b) return out;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, out);
    return out;
}

}  // namespace htrl
