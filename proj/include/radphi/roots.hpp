#pragma once

#include <radphi/util.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace radphi {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

// Grow [lo, hi] geometrically around its center until g changes sign across
// the interval.  glo/ghi are updated in place.  Returns false when no sign
// change appears within max_expand rounds.
template <class F>
bool expand_bracket(F&& g, double& lo, double& hi, double& glo, double& ghi,
                    int max_expand = 64) {
    glo = g(lo);
    ghi = g(hi);
    for (int round = 0; round < max_expand; ++round) {
        if (glo == 0.0 || ghi == 0.0) return true;
        if ((glo < 0.0) != (ghi < 0.0)) return true;
        const double mid = 0.5 * (lo + hi);
        const double half = std::max(hi - mid, 1e-12 * (1.0 + std::abs(mid)));
        lo = mid - 2.0 * half;
        hi = mid + 2.0 * half;
        glo = g(lo);
        ghi = g(hi);
    }
    return (glo < 0.0) != (ghi < 0.0);
}

// Plain bisection.  Requires a sign change on [lo, hi]; stops early on an
// exact zero, otherwise runs until the interval drops under
// tol_x * (1 + |x|) or max_iter halvings.
template <class F>
RootResult bisect(F&& g, double lo, double hi, double tol_x = 1e-12,
                  int max_iter = 200) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return {lo, 0.0, 0};
    if (ghi == 0.0) return {hi, 0.0, 0};
    if ((glo < 0.0) == (ghi < 0.0)) {
        std::ostringstream os;
        os << "bisect: no sign change on [" << lo << ", " << hi << "], g = ("
           << glo << ", " << ghi << ")";
        throw numerical_error(os.str());
    }
    int it = 0;
    double mid = 0.5 * (lo + hi), gmid = glo;
    for (; it < max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        gmid = g(mid);
        if (gmid == 0.0) return {mid, 0.0, it + 1};
        if ((gmid < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
            ghi = gmid;
        }
        if (hi - lo <= tol_x * (1.0 + std::abs(mid))) break;
    }
    mid = 0.5 * (lo + hi);
    return {mid, g(mid), it};
}

// Brent-Dekker: bisection safety with inverse-quadratic/secant speed.
template <class F>
RootResult brent(F&& g, double a, double b, double tol_x = 1e-14,
                 int max_iter = 200) {
    double fa = g(a), fb = g(b);
    if (fa == 0.0) return {a, 0.0, 0};
    if (fb == 0.0) return {b, 0.0, 0};
    if ((fa < 0.0) == (fb < 0.0)) {
        std::ostringstream os;
        os << "brent: no sign change on [" << a << ", " << b << "], g = ("
           << fa << ", " << fb << ")";
        throw numerical_error(os.str());
    }
    double c = a, fc = fa, d = b - a, e = d;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol_x;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return {b, fb, it};
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = g(b);
        if ((fb < 0.0) == (fc < 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return {b, fb, it};
}

}  // namespace radphi
