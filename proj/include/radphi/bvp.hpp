#pragma once

#include <radphi/energy.hpp>
#include <radphi/shooting.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace radphi {

// ---------------------------------------------------------------------------
// Boundary problem layer: scan shooting heights for sign changes of the
// terminal residual, refine roots by bisection, attach the structural
// diagnostics that the nonexistence argument is built from, and sweep the
// parameter to locate the threshold above which no positive solution
// survives.
// ---------------------------------------------------------------------------

// Structure checks on one profile, mirroring the chain of the nonexistence
// argument: the height floor u(0) >= U0, the level crossings
// r1 (u = (u0+U0)/2, expected in (0, 1/2]) and r2 (u = u0/c, expected in
// [3/4, 1)), the mean-value slope between them with its 6 U0 ceiling, the
// negative plateau M of F between the two levels, and the induced bound
// E(r3) <= lambda M + c_hat_1 (6 U0)^p.  The slope and energy checks only
// engage when both crossings exist and r2 - r1 >= 1/4.
struct LemmaReport {
    double c = 4.0;
    bool u0_bound_ok = false;
    double u0_margin = 0.0;
    std::optional<double> r1;
    bool r1_in_half = false;
    std::optional<double> r2;
    bool r2_in_quarter = false;
    std::optional<double> r3;
    std::optional<double> slope;  // (u(r1) - u(r2)) / (r2 - r1)
    bool bounds_checked = false;
    bool slope_bound_ok = true;
    double M = 0.0;
    double energy_upper = 0.0;
    std::optional<double> e_r3;
    bool energy_bound_ok = true;
    bool monotone_decreasing = false;
};

struct SolutionRecord {
    double lambda = 0.0;
    double a = 0.0;        // shooting height u(0)
    double residual = 0.0; // |terminal u|
    bool positive = false;
    double e_min = 0.0;    // min of E along the profile
    Trajectory traj;
    LemmaReport diagnostics;
};

struct SweepReport {
    std::vector<double> lambda_grid;
    std::vector<std::vector<SolutionRecord>> records;  // one list per grid point
    std::optional<double> lambda0_estimate;
    std::optional<std::pair<double, double>> lambda0_bracket;
    std::optional<double> lambda1_evidence;  // smallest lambda with r1 <= 1/2 observed
    std::optional<double> lambda2_evidence;  // smallest lambda with r2 >= 3/4 observed
};

// Smallest radius where the profile crosses the given level, by linear
// interpolation between rows (exact row hits return the row radius).
inline std::optional<double> find_crossing(const Trajectory& traj, double level) {
    for (size_t i = 0; i < traj.r.size(); ++i) {
        if (traj.u[i] == level) return traj.r[i];
        if (i + 1 < traj.r.size()) {
            const double a = traj.u[i], b = traj.u[i + 1];
            if ((a > level && b < level) || (a < level && b > level))
                return traj.r[i] + (traj.r[i + 1] - traj.r[i]) * (a - level) / (a - b);
        }
    }
    return std::nullopt;
}

inline std::pair<bool, double> verify_lemma_u0(const ProblemInstance& prob,
                                               const Trajectory& traj) {
    const double U0 = prob.reaction.U0;
    const double margin = traj.u.front() - U0;
    return {traj.u.front() >= U0 * (1.0 - 1e-6), margin};
}

inline LemmaReport verify_theorem_bounds(const ProblemInstance& prob,
                                         const Trajectory& traj, double c = 4.0) {
    if (!(c > 2.0))
        throw std::invalid_argument("verify_theorem_bounds: need c > 2");
    const ReactionModel& f = prob.reaction;
    LemmaReport rep;
    rep.c = c;
    std::tie(rep.u0_bound_ok, rep.u0_margin) = verify_lemma_u0(prob, traj);

    const double level1 = 0.5 * (f.u0 + f.U0);
    const double level2 = f.u0 / c;
    rep.r1 = find_crossing(traj, level1);
    rep.r2 = find_crossing(traj, level2);
    rep.r1_in_half = rep.r1 && *rep.r1 <= 0.5 + 1e-9;
    rep.r2_in_quarter = rep.r2 && *rep.r2 >= 0.75 - 1e-9;

    rep.monotone_decreasing = true;
    for (size_t i = 1; i < traj.r.size(); ++i)
        if (!(traj.du[i] < 0.0)) { rep.monotone_decreasing = false; break; }

    // M is the peak of F over [u0/c, (u0+U0)/2]; F falls then rises across
    // u0, so the peak sits at one of the endpoints.
    rep.M = std::max(big_f(f, level2), big_f(f, level1));
    rep.energy_upper =
        prob.lambda * rep.M + prob.phi.c_hat_1 * std::pow(6.0 * f.U0, prob.phi.p);

    if (rep.r1 && rep.r2 && *rep.r2 > *rep.r1) {
        const double slope = (level1 - level2) / (*rep.r2 - *rep.r1);
        rep.slope = slope;
        // Mean value point: first radius in (r1, r2) where |u'| meets the
        // average slope; fall back to the closest row if interpolation finds
        // no sign change (it always should, |u'| is continuous).
        std::optional<double> r3;
        double best_gap = 0.0, best_r = 0.0;
        bool have_best = false;
        for (size_t i = 0; i + 1 < traj.r.size(); ++i) {
            if (traj.r[i] <= *rep.r1 || traj.r[i + 1] >= *rep.r2) continue;
            const double g0 = std::abs(traj.du[i]) - slope;
            const double g1 = std::abs(traj.du[i + 1]) - slope;
            if (!have_best || std::abs(g0) < best_gap) {
                best_gap = std::abs(g0);
                best_r = traj.r[i];
                have_best = true;
            }
            if (g0 == 0.0) { r3 = traj.r[i]; break; }
            if ((g0 < 0.0) != (g1 < 0.0)) {
                r3 = traj.r[i] + (traj.r[i + 1] - traj.r[i]) * g0 / (g0 - g1);
                break;
            }
        }
        if (!r3 && have_best) r3 = best_r;
        rep.r3 = r3;

        rep.bounds_checked = (*rep.r2 - *rep.r1) >= 0.25;
        if (rep.bounds_checked) {
            rep.slope_bound_ok = slope <= 6.0 * f.U0 * (1.0 + 1e-9);
            if (r3) {
                // E at r3 by linear interpolation of the energy trace.
                const EnergyTrace tr = energy(prob, traj);
                double e = tr.E.back();
                for (size_t i = 0; i + 1 < tr.r.size(); ++i) {
                    if (tr.r[i] <= *r3 && *r3 <= tr.r[i + 1]) {
                        const double w =
                            (*r3 - tr.r[i]) / (tr.r[i + 1] - tr.r[i]);
                        e = (1.0 - w) * tr.E[i] + w * tr.E[i + 1];
                        break;
                    }
                }
                rep.e_r3 = e;
                rep.energy_bound_ok =
                    e <= rep.energy_upper + 1e-9 * (1.0 + std::abs(rep.energy_upper));
            }
        }
    }
    return rep;
}

namespace detail {

// Residual acceptance gate for refined roots.
inline double root_tol(double a) { return 1e-9 * (1.0 + a); }

inline SolutionRecord make_record(const ProblemInstance& prob, double a,
                                  const GridConfig& grid, double c) {
    SolutionRecord rec;
    rec.lambda = prob.lambda;
    rec.a = a;
    ShootResult sh = shoot(prob, a, grid);
    rec.residual = std::abs(sh.terminal_u);
    rec.traj = std::move(sh.traj);
    rec.positive = rec.traj.reached_boundary() && !rec.traj.first_crossing() &&
                   rec.traj.min_u_interior() > 0.0;
    rec.diagnostics = verify_theorem_bounds(prob, rec.traj, c);
    EnergyReport er = check_energy_laws(prob, rec.traj);
    rec.e_min = er.e_min;
    return rec;
}

}  // namespace detail

// Scan [a_min, a_max] with n_scan shots (log-spaced when the range covers a
// decade or more), bisect every sign change of the terminal residual, and
// keep the roots whose residual actually collapses under the 1e-9 (1 + a)
// gate.  Near-tangencies make the residual jump across zero without pausing
// near it; their brackets stall at a finite residual and are dropped, which
// is exactly the nonexistence signal the sweep relies on.
inline std::vector<SolutionRecord> find_solutions(const ProblemInstance& prob,
                                                  double a_min, double a_max,
                                                  int n_scan,
                                                  const GridConfig& grid = {},
                                                  double c = 4.0) {
    if (!(a_min > 0.0) || !(a_max > a_min))
        throw std::invalid_argument("find_solutions: need 0 < a_min < a_max");
    if (n_scan < 8) throw std::invalid_argument("find_solutions: need n_scan >= 8");

    const std::vector<double> heights = (a_max / a_min >= 10.0)
                                            ? logspace(a_min, a_max, n_scan)
                                            : linspace(a_min, a_max, n_scan);
    std::vector<double> res(heights.size());
    for (size_t i = 0; i < heights.size(); ++i)
        res[i] = shoot(prob, heights[i], grid).terminal_u;

    std::vector<SolutionRecord> out;
    auto accept = [&](double a_root) {
        out.push_back(detail::make_record(prob, a_root, grid, c));
    };

    // Exact zeros on the scan grid count once, up front; brackets then only
    // form between strictly nonzero residuals, so a grid-point root is not
    // recovered a second time from its neighboring pair.
    for (size_t i = 0; i < heights.size(); ++i)
        if (res[i] == 0.0) accept(heights[i]);

    for (size_t i = 0; i + 1 < heights.size(); ++i) {
        if (res[i] == 0.0 || res[i + 1] == 0.0) continue;
        if ((res[i] < 0.0) == (res[i + 1] < 0.0)) continue;

        // Bisect the bracket; prefer landing on the nonnegative-residual
        // side so the accepted record keeps a positive interior.
        double lo = heights[i], hi = heights[i + 1];
        double flo = res[i];
        std::optional<double> best_any, best_pos;
        double best_any_res = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double fm = shoot(prob, mid, grid).terminal_u;
            const double afm = std::abs(fm);
            if (afm <= detail::root_tol(mid)) {
                if (fm >= 0.0) { best_pos = mid; break; }
                if (!best_any || afm < best_any_res) {
                    best_any = mid;
                    best_any_res = afm;
                }
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        if (best_pos)
            accept(*best_pos);
        else if (best_any)
            accept(*best_any);
        // else: stalled bracket, a tangency artifact; drop it.
    }
    std::sort(out.begin(), out.end(),
              [](const SolutionRecord& x, const SolutionRecord& y) { return x.a < y.a; });
    return out;
}

// First grid point from which onward no positive solution was found, given
// that some earlier point had one; the whole grid counting as empty returns
// the first point, and a grid whose last point still has solutions returns
// nothing.
inline std::optional<double> estimate_lambda0(const SweepReport& rep) {
    const auto& grid = rep.lambda_grid;
    if (rep.records.size() != grid.size())
        throw std::invalid_argument("estimate_lambda0: records/grid size mismatch");
    if (grid.empty()) return std::nullopt;
    auto has_positive = [&](size_t i) {
        for (const auto& r : rep.records[i])
            if (r.positive) return true;
        return false;
    };
    std::optional<size_t> last_with;
    for (size_t i = 0; i < grid.size(); ++i)
        if (has_positive(i)) last_with = i;
    if (!last_with) return grid.front();
    if (*last_with + 1 >= grid.size()) return std::nullopt;
    return grid[*last_with + 1];
}

inline SweepReport sweep_lambda(const ProblemInstance& base,
                                const std::vector<double>& lambda_grid,
                                double a_min, double a_max, int n_scan,
                                const GridConfig& grid = {}, double c = 4.0) {
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0))
            throw std::invalid_argument("sweep_lambda: grid values must be positive");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
            throw std::invalid_argument("sweep_lambda: grid must be strictly increasing");
    }
    SweepReport rep;
    rep.lambda_grid = lambda_grid;
    rep.records.resize(lambda_grid.size());
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        ProblemInstance prob = base;
        prob.lambda = lambda_grid[i];
        rep.records[i] = find_solutions(prob, a_min, a_max, n_scan, grid, c);
    }
    rep.lambda0_estimate = estimate_lambda0(rep);
    std::optional<size_t> last_with;
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        bool any = false;
        for (const auto& r : rep.records[i])
            if (r.positive) any = true;
        if (any) last_with = i;
        for (const auto& r : rep.records[i]) {
            if (!r.positive) continue;
            if (r.diagnostics.r1_in_half && !rep.lambda1_evidence)
                rep.lambda1_evidence = lambda_grid[i];
            if (r.diagnostics.r2_in_quarter && !rep.lambda2_evidence)
                rep.lambda2_evidence = lambda_grid[i];
        }
    }
    if (last_with && rep.lambda0_estimate)
        rep.lambda0_bracket = std::make_pair(lambda_grid[*last_with], *rep.lambda0_estimate);
    return rep;
}

}  // namespace radphi
