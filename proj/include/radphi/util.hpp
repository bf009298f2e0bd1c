#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace radphi {

// Failure of an iterative numerical procedure (root bracket, corrector,
// quadrature).  Bad configuration or bad input data throws
// std::invalid_argument instead, so callers can tell the two apart.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    v.back() = hi;
    return v;
}

// Geometric spacing, endpoints included.  Both bounds must be positive.
inline std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > 0.0))
        throw std::invalid_argument("logspace: bounds must be positive");
    if (n < 2) throw std::invalid_argument("logspace: need at least 2 points");
    std::vector<double> v(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) v[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

// r^(n) for small integer n >= 0, without going through pow().
inline double ipow(double r, int n) {
    double acc = 1.0;
    for (int i = 0; i < n; ++i) acc *= r;
    return acc;
}

}  // namespace radphi
