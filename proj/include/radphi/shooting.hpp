#pragma once

#include <radphi/models.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace radphi {

struct GridConfig {
    int n_steps = 2048;
    double corrector_tol = 1e-12;
    int max_corrector_iters = 50;
    // For p > 2 the solution has unbounded curvature at the origin
    // (u' ~ -C r^(1/(p-1))), which would cap the trapezoid at order
    // 1 + 1/(p-1).  Integrating the first few cells on an internal subgrid
    // keeps the observed order at two over practical resolutions.
    int origin_refine_cells = 8;
    int origin_refine_factor = 16;
    // Same story at an interior turning radius: when I changes sign inside a
    // cell, u' crosses zero where the inverse flux map has unbounded slope
    // for p > 2.  Cells caught flipping the sign of I are redone on a
    // subgrid, and the window of cells right after the flip (where |I| is
    // still small and the inverse keeps amplifying quadrature error) runs on
    // the same subgrid.
    int turning_refine_factor = 32;
    int turning_refine_cells = 8;
};

enum class EventKind { zero_crossing, reached_boundary, window_exit };

struct TrajectoryEvent {
    EventKind kind = EventKind::zero_crossing;
    double r = 0.0;
};

// Rows of the radial profile: radius, value, derivative, and the running
// flux integral I(r) = int_0^r lambda t^(N-1) f(u(t)) dt.  At every stored
// row du = -varphi^{-1}(I / r^(N-1)) holds to corrector accuracy.
struct Trajectory {
    std::vector<double> r, u, du, I;
    std::vector<TrajectoryEvent> events;

    bool reached_boundary() const {
        for (const auto& e : events)
            if (e.kind == EventKind::reached_boundary) return true;
        return false;
    }

    std::optional<double> first_crossing() const {
        for (const auto& e : events)
            if (e.kind == EventKind::zero_crossing) return e.r;
        return std::nullopt;
    }

    // Smallest u over the rows strictly inside the ball.
    double min_u_interior() const {
        double m = u.front();
        for (size_t i = 0; i < r.size(); ++i)
            if (r[i] < 1.0) m = std::min(m, u[i]);
        return m;
    }
};

struct IntegrateOptions {
    // Keep integrating through u = 0 instead of truncating there (used for
    // continuation studies; the default shooting residual wants truncation).
    bool continue_past_zero = false;
    // |u| cap while continuing; 0 picks 1e6 * (1 + a).
    double u_window = 0.0;
};

namespace detail {

struct StepState {
    double u = 0.0, du = 0.0, I = 0.0;
};

inline double flux_weight(const ProblemInstance& prob, double r, double u) {
    return prob.lambda * ipow(r, prob.N - 1) * reaction(prob.reaction, u);
}

// d/dr of the flux weight along a profile with value u and slope du there.
inline double flux_weight_prime(const ProblemInstance& prob, double r, double u,
                                double du) {
    const double f = reaction(prob.reaction, u);
    const double fp = reaction_prime(prob.reaction, u);
    const double geom = prob.N >= 2 ? (prob.N - 1) * ipow(r, prob.N - 2) * f : 0.0;
    return prob.lambda * (geom + ipow(r, prob.N - 1) * fp * du);
}

// Analytic start on [0, r2]: with f frozen at u(0) the flux is
// I(r) = lambda f(a) r^N / N exactly, so u' = -varphi^{-1}(lambda f(a) r / N)
// and u comes from one fixed quadrature of that profile.
inline StepState first_step(const ProblemInstance& prob, double a, double r2) {
    const double fa = reaction(prob.reaction, a);
    const double c = prob.lambda * fa / prob.N;
    const double I2 = prob.lambda * fa * ipow(r2, prob.N) / prob.N;
    const double du2 = -varphi_inverse(prob.phi, c * r2);
    const double u2 =
        a - gauss8([&](double t) { return varphi_inverse(prob.phi, c * t); }, 0.0, r2);
    return {u2, du2, I2};
}

// One implicit trapezoid step from (r1, s1) to r2.  The coupled update
//   I2 = I1 + h/2 (g1 + lambda r2^(N-1) f(u2)),
//   du2 = -varphi^{-1}(I2 / r2^(N-1)),
//   u2 = u1 + h/2 (du1 + du2)
// is solved for u2 by fixed-point iteration.  When the iteration diverges
// (large h^2 lambda f'), the same scalar equation is closed by bisection;
// the residual v - u1 - h/2 (du1 + du2(v)) is increasing in v whenever f is
// nondecreasing, so a sign-change bracket always exists.
inline StepState advance_step(const ProblemInstance& prob, double r1,
                              const StepState& s1, double r2,
                              const GridConfig& grid) {
    const double h = r2 - r1;
    const double g1 = flux_weight(prob, r1, s1.u);
    const double rpow = ipow(r2, prob.N - 1);
    const double predictor = s1.u + h * s1.du;

    // Endpoint-corrected trapezoid for the flux.  The plain rule leaves an
    // h^2 w'(r) Euler-Maclaurin term in I, and recovering u' divides that by
    // r^(N-1): summed over the cells near the origin it costs the profile an
    // h^2 log(1/h) term.  Subtracting h^2/12 (w'(r2) - w'(r1)), with the
    // right endpoint frozen at predictor values so the corrector equation
    // stays monotone in v, removes it.  The guard drops the correction where
    // f' spikes (power reactions with alpha < 1 approaching u = 0).
    double corr = 0.0;
    {
        const double g2p = prob.lambda * rpow * reaction(prob.reaction, predictor);
        const double I_pred = s1.I + 0.5 * h * (g1 + g2p);
        const double du_pred = -varphi_inverse(prob.phi, I_pred / rpow);
        const double wp1 = flux_weight_prime(prob, r1, s1.u, s1.du);
        const double wp2 = flux_weight_prime(prob, r2, predictor, du_pred);
        corr = -h * h / 12.0 * (wp2 - wp1);
        const double trap_scale =
            std::abs(0.5 * h * (g1 + g2p)) + 1e-9 * (1.0 + std::abs(s1.I));
        if (!std::isfinite(corr) || std::abs(corr) > 0.25 * trap_scale) corr = 0.0;
    }

    auto eval = [&](double v) -> StepState {
        const double I2 = s1.I + corr +
                          0.5 * h * (g1 + prob.lambda * rpow * reaction(prob.reaction, v));
        const double du2 = -varphi_inverse(prob.phi, I2 / rpow);
        return {v, du2, I2};
    };

    double v = predictor;
    StepState cur = eval(v);
    bool converged = false;
    for (int it = 0; it < grid.max_corrector_iters; ++it) {
        const double vn = s1.u + 0.5 * h * (s1.du + cur.du);
        if (!std::isfinite(vn)) break;
        const bool done = std::abs(vn - v) <= grid.corrector_tol * (1.0 + std::abs(vn));
        v = vn;
        cur = eval(v);
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        auto res = [&](double w) { return w - s1.u - 0.5 * h * (s1.du + eval(w).du); };
        // Monotone walk outward from the predictor until the residual
        // changes sign, then bisect.
        double lo = predictor, hi = predictor;
        double step = std::max(std::abs(h * s1.du), 1e-3 * (1.0 + std::abs(s1.u)));
        int rounds = 0;
        while (res(lo) > 0.0) {
            lo -= step;
            step *= 2.0;
            if (++rounds > 120)
                throw numerical_error("advance_step: no lower bracket for the corrector at r = " +
                                      std::to_string(r2));
        }
        step = std::max(std::abs(h * s1.du), 1e-3 * (1.0 + std::abs(s1.u)));
        while (res(hi) < 0.0) {
            hi += step;
            step *= 2.0;
            if (++rounds > 240)
                throw numerical_error("advance_step: no upper bracket for the corrector at r = " +
                                      std::to_string(r2));
        }
        v = bisect(res, lo, hi, grid.corrector_tol).x;
        cur = eval(v);
    }
    return cur;
}

inline StepState step(const ProblemInstance& prob, double r1, const StepState& s1,
                      double r2, const GridConfig& grid) {
    return r1 == 0.0 ? first_step(prob, s1.u, r2) : advance_step(prob, r1, s1, r2, grid);
}

// Locate the radius in (r1, r2] where the step solution hits u = 0, given
// that the full step lands at or below zero.  The returned row is pinned to
// u = 0 with du and I taken from the step map at that radius, so the
// du / I consistency identity survives truncation.
inline std::pair<double, StepState> solve_crossing(const ProblemInstance& prob,
                                                   double r1, const StepState& s1,
                                                   double r2, const GridConfig& grid) {
    double lo = r1, hi = r2;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (step(prob, r1, s1, mid, grid).u > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    StepState at = step(prob, r1, s1, hi, grid);
    at.u = 0.0;
    return {hi, at};
}

}  // namespace detail

// March the radial IVP u(0) = a, u'(0) = 0 across a uniform grid on [0, 1]
// with the implicit trapezoid scheme in integral form.  By default the march
// truncates at the first zero of u with a solved (not interpolated) partial
// step; with continue_past_zero it records crossings as events and keeps
// going until r = 1 or |u| leaves the window.
inline Trajectory integrate_ivp(const ProblemInstance& prob, double a,
                                const GridConfig& grid = {},
                                const IntegrateOptions& opts = {}) {
    if (!(a > 0.0)) throw std::invalid_argument("integrate_ivp: need a > 0");
    if (grid.n_steps < 16)
        throw std::invalid_argument("integrate_ivp: need n_steps >= 16");
    if (!(grid.corrector_tol > 0.0))
        throw std::invalid_argument("integrate_ivp: corrector_tol must be positive");
    if (grid.max_corrector_iters < 1)
        throw std::invalid_argument("integrate_ivp: max_corrector_iters must be >= 1");
    if (grid.origin_refine_cells < 0 || grid.origin_refine_factor < 1)
        throw std::invalid_argument("integrate_ivp: bad origin refinement settings");
    if (grid.turning_refine_factor < 1 || grid.turning_refine_cells < 0)
        throw std::invalid_argument("integrate_ivp: bad turning refinement settings");

    const double window = opts.u_window > 0.0 ? opts.u_window : 1e6 * (1.0 + a);
    Trajectory traj;
    traj.r.reserve(grid.n_steps + 1);
    traj.u.reserve(grid.n_steps + 1);
    traj.du.reserve(grid.n_steps + 1);
    traj.I.reserve(grid.n_steps + 1);
    auto push = [&](double r, const detail::StepState& s) {
        traj.r.push_back(r);
        traj.u.push_back(s.u);
        traj.du.push_back(s.du);
        traj.I.push_back(s.I);
    };

    detail::StepState cur{a, 0.0, 0.0};
    push(0.0, cur);
    double r_cur = 0.0;
    bool stopped = false;
    int turn_tail = 0;  // cells left in a post-turning refinement window

    for (int i = 0; i < grid.n_steps && !stopped; ++i) {
        const double cell_start = r_cur;
        const double cell_end = (i + 1) / static_cast<double>(grid.n_steps);
        int sub = (i < grid.origin_refine_cells) ? grid.origin_refine_factor : 1;
        if (turn_tail > 0 && sub == 1) {
            sub = grid.turning_refine_factor;
            --turn_tail;
        }
        for (int s = 1; s <= sub; ++s) {
            const double r_next =
                (s == sub) ? cell_end : cell_start + (cell_end - cell_start) * s / sub;
            const detail::StepState nxt = detail::step(prob, r_cur, cur, r_next, grid);
            if (sub == 1 && grid.turning_refine_factor > 1 && cur.I != 0.0 &&
                nxt.I != 0.0 && std::signbit(nxt.I) != std::signbit(cur.I)) {
                // Turning radius inside this cell; discard the step and redo
                // the cell on the subgrid, then keep the subgrid through the
                // window behind the flip.
                sub = grid.turning_refine_factor;
                turn_tail = grid.turning_refine_cells;
                s = 0;
                continue;
            }
            if (!opts.continue_past_zero && cur.u > 0.0 && nxt.u <= 0.0) {
                const auto [rc, pinned] =
                    detail::solve_crossing(prob, r_cur, cur, r_next, grid);
                push(rc, pinned);
                traj.events.push_back({EventKind::zero_crossing, rc});
                stopped = true;
                break;
            }
            if (opts.continue_past_zero &&
                ((cur.u > 0.0 && nxt.u <= 0.0) || (cur.u < 0.0 && nxt.u >= 0.0))) {
                const double denom = cur.u - nxt.u;
                const double rc =
                    denom != 0.0 ? r_cur + (r_next - r_cur) * cur.u / denom : r_next;
                traj.events.push_back({EventKind::zero_crossing, rc});
            }
            r_cur = r_next;
            cur = nxt;
        }
        if (stopped) break;
        push(r_cur, cur);
        if (std::abs(cur.u) > window) {
            traj.events.push_back({EventKind::window_exit, r_cur});
            stopped = true;
        }
    }
    if (!stopped && r_cur == 1.0)
        traj.events.push_back({EventKind::reached_boundary, 1.0});
    return traj;
}

// Shooting functional around the truncating integrator.  terminal_u is
// continuous in a: it equals u(1) when the profile reaches the boundary and
// the negative surrogate -(1 - r*) |u'(r*)| when the profile died at r* < 1,
// so sign changes of terminal_u bracket boundary roots.
struct ShootResult {
    double terminal_u = 0.0;
    double min_u = 0.0;
    std::optional<double> crossing_radius;
    double du_at_1 = 0.0;
    Trajectory traj;
};

inline ShootResult shoot(const ProblemInstance& prob, double a,
                         const GridConfig& grid = {}) {
    ShootResult out;
    out.traj = integrate_ivp(prob, a, grid);
    const Trajectory& t = out.traj;
    out.crossing_radius = t.first_crossing();
    out.min_u = t.min_u_interior();
    out.du_at_1 = t.du.back();
    if (t.reached_boundary()) {
        out.terminal_u = t.u.back();
    } else if (out.crossing_radius) {
        out.terminal_u = -(1.0 - *out.crossing_radius) * std::abs(t.du.back());
    } else {
        throw numerical_error("shoot: profile left the window before r = 1 (a = " +
                              std::to_string(a) + ")");
    }
    return out;
}

}  // namespace radphi
