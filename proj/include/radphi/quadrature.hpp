#pragma once

#include <radphi/util.hpp>

#include <cmath>

namespace radphi {

namespace detail {

template <class F>
double simpson_rec(F&& f, double a, double fa, double b, double fb, double m,
                   double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw numerical_error("adaptive_simpson: recursion depth exhausted");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b].  tol is absolute; callers integrating large
// magnitudes should scale it themselves.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12,
                        int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Fixed 8-point Gauss-Legendre on [a, b].  Used for short smooth stretches
// where adaptivity would be wasted.
template <class F>
double gauss8(F&& f, double a, double b) {
    static const double xs[4] = {0.1834346424956498, 0.5255324099163290,
                                 0.7966664774136267, 0.9602898564975363};
    static const double ws[4] = {0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        acc += ws[i] * (f(c - h * xs[i]) + f(c + h * xs[i]));
    return acc * h;
}

}  // namespace radphi
