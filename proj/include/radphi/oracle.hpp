#pragma once

#include <radphi/shooting.hpp>

#include <cmath>

namespace radphi {

// ---------------------------------------------------------------------------
// Closed-form reference: N = 3, p = 2, f(u) = u - 1.  The radial problem
// linearizes and the profile through u(0) = a is
//
//     u(r) = 1 + (a - 1) sin(sqrt(lambda) r) / (sqrt(lambda) r),
//
// valid while sqrt(lambda) is not a multiple of pi.  Used to pin the
// integrator's accuracy and convergence order against something external to
// the scheme.
// ---------------------------------------------------------------------------

struct LinearBallSolution {
    double lambda = 1.0;  // must satisfy 0 < sqrt(lambda) < pi
    double a = 2.0;

    LinearBallSolution(double lambda_, double a_) : lambda(lambda_), a(a_) {
        if (!(lambda > 0.0) || !(std::sqrt(lambda) < M_PI))
            throw std::invalid_argument(
                "LinearBallSolution: need 0 < sqrt(lambda) < pi");
    }
};

namespace detail {

inline void check_linear_args(double lambda, double r) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("linear_exact: need lambda > 0");
    if (r < 0.0 || r > 1.0)
        throw std::invalid_argument("linear_exact: need 0 <= r <= 1");
    const double ratio = std::sqrt(lambda) / M_PI;
    if (std::abs(ratio - std::round(ratio)) < 1e-12 && std::round(ratio) >= 1.0)
        throw std::invalid_argument(
            "linear_exact: sqrt(lambda) sits on a multiple of pi");
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

inline double sinc_prime(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return -x / 3.0 + x * x2 / 30.0;
    }
    return std::cos(x) / x - std::sin(x) / (x * x);
}

}  // namespace detail

inline double linear_exact(double lambda, double a, double r) {
    detail::check_linear_args(lambda, r);
    const double w = std::sqrt(lambda);
    return 1.0 + (a - 1.0) * detail::sinc(w * r);
}

inline double linear_exact_du(double lambda, double a, double r) {
    detail::check_linear_args(lambda, r);
    const double w = std::sqrt(lambda);
    return (a - 1.0) * w * detail::sinc_prime(w * r);
}

// Flux integral I(r) = lambda int_0^r t^2 (u - 1) dt of the closed form,
// satisfying u' = -I / r^2.
inline double linear_exact_I(double lambda, double a, double r) {
    detail::check_linear_args(lambda, r);
    const double w = std::sqrt(lambda);
    if (r == 0.0) return 0.0;
    return (a - 1.0) * (std::sin(w * r) - w * r * std::cos(w * r)) / w;
}

// ---------------------------------------------------------------------------
// Refinement self-oracle: integrate on a grid four times finer and keep
// every fourth row, so a trajectory at the requested resolution carries
// fourth-grid accuracy.  Truncated profiles keep their (finer) crossing row.
// ---------------------------------------------------------------------------

inline Trajectory richardson_reference(const ProblemInstance& prob, double a,
                                       const GridConfig& grid = {},
                                       const IntegrateOptions& opts = {}) {
    GridConfig fine = grid;
    fine.n_steps = grid.n_steps * 4;
    const Trajectory full = integrate_ivp(prob, a, fine, opts);
    Trajectory down;
    down.events = full.events;
    const size_t n = full.r.size();
    for (size_t j = 0; j < n; ++j) {
        const bool main_node = (j % 4 == 0);
        const bool final_partial =
            (j + 1 == n) && !full.reached_boundary();  // crossing or window row
        if (main_node || final_partial) {
            down.r.push_back(full.r[j]);
            down.u.push_back(full.u[j]);
            down.du.push_back(full.du[j]);
            down.I.push_back(full.I[j]);
        }
    }
    return down;
}

}  // namespace radphi
