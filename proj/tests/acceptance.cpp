// Acceptance gate: eight criteria, one PASS/FAIL line each, exit code is the
// number of failures.  Runs standalone (no test framework) so the output
// stays a readable checklist.

#include <radphi/bvp.hpp>
#include <radphi/oracle.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace radphi;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

ProblemInstance make_problem(int N, double lambda, PhiModel phi, ReactionModel f) {
    ProblemInstance prob;
    prob.N = N;
    prob.lambda = lambda;
    prob.phi = std::move(phi);
    prob.reaction = std::move(f);
    return prob;
}

ProblemInstance linear_ball(double lambda) {
    return make_problem(3, lambda, make_p_laplacian(2.0), make_linear_shift(1.0));
}

ProblemInstance superlinear_ball(double lambda) {
    return make_problem(3, lambda, make_p_laplacian(2.0), make_power_shift(2.0, 1.0));
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail(Outcome& out, const std::string& msg) {
    out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += msg;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Shared by criteria 4-7: the three sweeps of criterion 6 pooled together.
struct SweepBundle {
    SweepReport base;   // n_steps 2048, n_scan 96
    SweepReport fine;   // n_steps 4096, n_scan 96
    SweepReport dense;  // n_steps 2048, n_scan 192
    double seconds = 0.0;
    std::vector<const SolutionRecord*> positives;  // pooled over all three
};

SweepBundle run_sweeps() {
    SweepBundle bundle;
    const double t0 = now_seconds();
    const ProblemInstance prob = superlinear_ball(1.0);
    std::vector<double> grid;
    for (int k = -2; k <= 14; ++k) grid.push_back(std::ldexp(1.0, k));
    const double a_lo = 1.01 * prob.reaction.u0;
    const double a_hi = 1e4 * prob.reaction.U0;

    GridConfig g;
    g.n_steps = 2048;
    bundle.base = sweep_lambda(prob, grid, a_lo, a_hi, 96, g);
    g.n_steps = 4096;
    bundle.fine = sweep_lambda(prob, grid, a_lo, a_hi, 96, g);
    g.n_steps = 2048;
    bundle.dense = sweep_lambda(prob, grid, a_lo, a_hi, 192, g);
    bundle.seconds = now_seconds() - t0;

    for (const SweepReport* rep : {&bundle.base, &bundle.fine, &bundle.dense})
        for (const auto& per_lambda : rep->records)
            for (const auto& rec : per_lambda)
                if (rec.positive) bundle.positives.push_back(&rec);
    return bundle;
}

// --- criterion 1: oracle equivalence on the linear ball ---------------------

Outcome criterion_oracle() {
    Outcome out;
    GridConfig grid;
    grid.n_steps = 4096;
    double worst = 0.0, slowest = 0.0;
    for (double lambda : {1.0, 4.0, 9.0}) {
        const ProblemInstance prob = linear_ball(lambda);
        for (double a : {0.2, 2.0, 5.0}) {
            const double t0 = now_seconds();
            const Trajectory traj = integrate_ivp(prob, a, grid);
            const double dt = now_seconds() - t0;
            slowest = std::max(slowest, dt);
            double sup = 0.0;
            for (size_t i = 0; i < traj.r.size(); ++i)
                sup = std::max(sup,
                               std::abs(traj.u[i] - linear_exact(lambda, a, traj.r[i])));
            worst = std::max(worst, sup);
            if (sup > 1e-6)
                fail(out, "sup err " + fmt("%.3e", sup) + " at lambda=" +
                              fmt("%g", lambda) + " a=" + fmt("%g", a));
            if (dt >= 1.0)
                fail(out, "shot took " + fmt("%.2f", dt) + " s at lambda=" +
                              fmt("%g", lambda) + " a=" + fmt("%g", a));
        }
    }
    if (out.pass)
        out.detail = "9 shots, sup err " + fmt("%.2e", worst) + ", slowest shot " +
                     fmt("%.3f", slowest) + " s";
    return out;
}

// --- criterion 2: convergence order of terminal_u ---------------------------

double observed_order(const ProblemInstance& prob, double a) {
    auto terminal = [&](int n) {
        GridConfig grid;
        grid.n_steps = n;
        return shoot(prob, a, grid).terminal_u;
    };
    const double ref = terminal(8192);
    const double e0 = std::abs(terminal(512) - ref);
    const double e2 = std::abs(terminal(2048) - ref);
    return std::log2(e0 / e2) / 2.0;
}

Outcome criterion_order() {
    Outcome out;
    const double lin = observed_order(linear_ball(4.0), 2.0);
    const double non = observed_order(superlinear_ball(2.0), 3.0);
    if (!(lin >= 1.8)) fail(out, "linear order " + fmt("%.3f", lin) + " < 1.8");
    if (!(non >= 1.5)) fail(out, "nonlinear order " + fmt("%.3f", non) + " < 1.5");
    if (out.pass)
        out.detail = "linear " + fmt("%.3f", lin) + ", nonlinear " + fmt("%.3f", non);
    return out;
}

// --- criterion 3: energy monotonicity over the builtin matrix ---------------

Outcome criterion_energy_matrix() {
    Outcome out;
    int shots = 0;
    double worst_jump = 0.0, worst_ratio = 1e300;
    for (double p : {2.0, 2.5, 3.0}) {
        for (int which_f : {0, 1}) {
            const ReactionModel f = which_f == 0 ? make_power_shift(2.0, 1.0)
                                                 : make_power_shift(3.0, 8.0);
            for (int N : {2, 3}) {
                const ProblemInstance prob =
                    make_problem(N, 1.0, make_p_laplacian(p), f);
                for (double a :
                     {1.1 * f.u0, f.U0, 3.0 * f.U0}) {
                    ++shots;
                    GridConfig grid;
                    grid.n_steps = 2048;
                    const Trajectory traj = integrate_ivp(prob, a, grid);
                    const EnergyTrace tr = energy(prob, traj);
                    double emax = 0.0, jump = 0.0;
                    for (double e : tr.E) emax = std::max(emax, std::abs(e));
                    for (size_t i = 0; i + 1 < tr.E.size(); ++i)
                        jump = std::max(jump, tr.E[i + 1] - tr.E[i]);
                    const double jump_rel = jump / (1.0 + emax);
                    worst_jump = std::max(worst_jump, jump_rel);
                    if (jump > 1e-8 * (1.0 + emax))
                        fail(out, "jump " + fmt("%.2e", jump_rel) + " at p=" +
                                      fmt("%g", p) + " N=" + std::to_string(N) +
                                      " f" + std::to_string(which_f) + " a=" +
                                      fmt("%.3g", a));

                    const double res1 = energy_derivative_residual(tr);
                    grid.n_steps = 4096;
                    const Trajectory traj2 = integrate_ivp(prob, a, grid);
                    const double res2 =
                        energy_derivative_residual(energy(prob, traj2));
                    const double ratio = res1 / res2;
                    worst_ratio = std::min(worst_ratio, ratio);
                    if (!(ratio >= 2.8))
                        fail(out, "residual ratio " + fmt("%.2f", ratio) + " at p=" +
                                      fmt("%g", p) + " N=" + std::to_string(N) +
                                      " f" + std::to_string(which_f) + " a=" +
                                      fmt("%.3g", a));
                }
            }
        }
    }
    if (out.pass)
        out.detail = std::to_string(shots) + " shots, worst jump " +
                     fmt("%.1e", worst_jump) + ", worst residual ratio " +
                     fmt("%.2f", worst_ratio);
    return out;
}

// --- criteria 4, 5, 7: laws on the pooled positive records ------------------

Outcome criterion_height_floor(const SweepBundle& sweeps) {
    Outcome out;
    const double U0 = make_power_shift(2.0, 1.0).U0;
    double worst = 1e300;
    for (const SolutionRecord* rec : sweeps.positives) {
        const double height = rec->traj.u.front();
        worst = std::min(worst, height - U0);
        if (!(height >= U0 * (1.0 - 1e-6)))
            fail(out, "u(0) = " + fmt("%.8f", height) + " < U0 at lambda=" +
                          fmt("%g", rec->lambda));
    }
    if (sweeps.positives.empty()) fail(out, "no positive records pooled");
    if (out.pass)
        out.detail = std::to_string(sweeps.positives.size()) +
                     " records, min u(0) - U0 = " + fmt("%.3e", worst);
    return out;
}

Outcome criterion_energy_floor(const SweepBundle& sweeps) {
    Outcome out;
    double worst = 1e300;
    const double f0 = std::abs(reaction(make_power_shift(2.0, 1.0), 0.0));
    for (const SolutionRecord* rec : sweeps.positives) {
        const double tol = 1e-6 * rec->lambda * (1.0 + f0);
        worst = std::min(worst, rec->e_min);
        if (!(rec->e_min >= -tol))
            fail(out, "E_min = " + fmt("%.3e", rec->e_min) + " at lambda=" +
                          fmt("%g", rec->lambda));
    }
    if (sweeps.positives.empty()) fail(out, "no positive records pooled");
    if (out.pass)
        out.detail = std::to_string(sweeps.positives.size()) +
                     " records, min E = " + fmt("%.3e", worst);
    return out;
}

Outcome criterion_proof_quantities(const SweepBundle& sweeps) {
    Outcome out;
    int gated = 0;
    for (const SolutionRecord* rec : sweeps.positives) {
        const LemmaReport& d = rec->diagnostics;
        if (!d.monotone_decreasing)
            fail(out, "u not decreasing at lambda=" + fmt("%g", rec->lambda));
        if (!(d.r1 && d.r2 && *d.r2 - *d.r1 >= 0.25)) continue;
        ++gated;
        if (!d.bounds_checked || !d.slope_bound_ok)
            fail(out, "slope bound failed at lambda=" + fmt("%g", rec->lambda));
        if (!(d.M < 0.0))
            fail(out, "M = " + fmt("%.3e", d.M) + " not negative at lambda=" +
                          fmt("%g", rec->lambda));
        if (!d.energy_bound_ok)
            fail(out, "E(r3) bound failed at lambda=" + fmt("%g", rec->lambda));
    }
    if (sweeps.positives.empty()) fail(out, "no positive records pooled");
    if (out.pass)
        out.detail = std::to_string(sweeps.positives.size()) + " records decreasing, " +
                     std::to_string(gated) + " met the r2 - r1 >= 1/4 gate";
    return out;
}

// --- criterion 6: nonexistence threshold stability ---------------------------

Outcome criterion_lambda0(const SweepBundle& sweeps) {
    Outcome out;
    const auto& e0 = sweeps.base.lambda0_estimate;
    const auto& e1 = sweeps.fine.lambda0_estimate;
    const auto& e2 = sweeps.dense.lambda0_estimate;
    if (!e0 || !e1 || !e2) {
        fail(out, "lambda0 estimate missing in at least one sweep");
        return out;
    }
    auto octaves = [](double a, double b) { return std::abs(std::log2(a / b)); };
    const double move_steps = octaves(*e0, *e1);
    const double move_scan = octaves(*e0, *e2);
    if (move_steps > 1.0 + 1e-9)
        fail(out, "estimate moved " + fmt("%.2f", move_steps) +
                      " octaves under step doubling");
    if (move_scan > 1.0 + 1e-9)
        fail(out, "estimate moved " + fmt("%.2f", move_scan) +
                      " octaves under scan doubling");
    if (sweeps.seconds >= 300.0)
        fail(out, "sweeps took " + fmt("%.0f", sweeps.seconds) + " s");
    if (out.pass)
        out.detail = "lambda0 = " + fmt("%g", *e0) + " (steps x2: " + fmt("%g", *e1) +
                     ", scan x2: " + fmt("%g", *e2) + "), sweeps " +
                     fmt("%.1f", sweeps.seconds) + " s";
    return out;
}

// --- criterion 8: operator and reaction hypotheses ---------------------------

Outcome criterion_hypotheses() {
    Outcome out;
    std::vector<std::pair<std::string, PhiModel>> phis;
    for (double p : {2.0, 2.5, 3.0}) {
        phis.emplace_back("p-lap(" + fmt("%g", p) + ")", make_p_laplacian(p));
        phis.emplace_back("pert(" + fmt("%g", p) + ")", make_perturbed_p(p));
    }
    const auto sgrid = logspace(1e-3, 1e3, 101);
    for (const auto& [name, phi] : phis) {
        for (double s : sgrid) {
            const double back = varphi_inverse(phi, varphi(phi, s));
            if (std::abs(back - s) > 1e-9 * (1.0 + s)) {
                fail(out, "roundtrip off by " + fmt("%.2e", std::abs(back - s)) +
                              " for " + name);
                break;
            }
        }
        // Product inequality with the sandwich constants, 32 x 32 pairs.
        const double q = 1.0 / (phi.p - 1.0);
        const double lo_c = std::pow(phi.c_hat_2 * phi.c_hat_2 / phi.c_hat_1, q);
        const double hi_c = std::pow(phi.c_hat_1 * phi.c_hat_1 / phi.c_hat_2, q);
        bool product_ok = true;
        for (double s : logspace(1e-2, 1e2, 32)) {
            for (double t : logspace(1e-2, 1e2, 32)) {
                const double both = varphi_inverse(phi, s * t);
                const double split = varphi_inverse(phi, s) * varphi_inverse(phi, t);
                if (both < lo_c * split * (1.0 - 1e-9) ||
                    both > hi_c * split * (1.0 + 1e-9)) {
                    product_ok = false;
                    break;
                }
            }
            if (!product_ok) break;
        }
        if (!product_ok) fail(out, "product inequality failed for " + name);
        for (double t : logspace(1e-3, 50.0, 61)) {
            if (big_phi(phi, t) > t * varphi(phi, t) * (1.0 + 1e-12) + 1e-14) {
                fail(out, "Phi(t) <= t varphi(t) failed for " + name);
                break;
            }
        }
    }

    std::vector<std::pair<std::string, ReactionModel>> reactions;
    reactions.emplace_back("u^2-1", make_power_shift(2.0, 1.0));
    reactions.emplace_back("u^3-8", make_power_shift(3.0, 8.0));
    reactions.emplace_back("u-1", make_linear_shift(1.0));
    for (const auto& [name, f] : reactions) {
        // F' = f by central differences; linear F differentiates exactly, so
        // errors at the roundoff floor count as passing.
        for (double u : {0.4, 1.7, 3.3}) {
            const double fu = reaction(f, u);
            auto err = [&](double h) {
                return std::abs((big_f(f, u + h) - big_f(f, u - h)) / (2.0 * h) - fu);
            };
            const double e0 = err(2e-2), e2 = err(5e-3);
            if (e0 <= 1e-12 * (1.0 + std::abs(fu)) &&
                e2 <= 1e-12 * (1.0 + std::abs(fu)))
                continue;
            const double order = std::log2(e0 / e2) / 2.0;
            if (!(order >= 1.8)) {
                fail(out, "F' order " + fmt("%.2f", order) + " for " + name +
                              " at u=" + fmt("%g", u));
                break;
            }
        }
        for (double t : logspace(0.5 * (f.u0 + f.U0), 1e3 * f.U0, 301)) {
            if (reaction(f, t) < f.k * std::pow(t, f.alpha) * (1.0 - 1e-9)) {
                fail(out, "growth bound failed for " + name + " near t=" +
                              fmt("%.3g", t));
                break;
            }
        }
    }
    if (out.pass)
        out.detail = std::to_string(phis.size()) + " operators, " +
                     std::to_string(reactions.size()) + " reactions";
    return out;
}

}  // namespace

int main() {
    std::printf("acceptance: precomputing the three lambda sweeps for criteria 4-7\n");
    SweepBundle sweeps;
    Outcome sweep_failure;
    try {
        sweeps = run_sweeps();
    } catch (const std::exception& e) {
        sweep_failure.pass = false;
        sweep_failure.detail = std::string("sweep threw: ") + e.what();
    }

    struct Entry {
        const char* label;
        const char* title;
        bool needs_sweeps;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries = {
        {"A1", "oracle equivalence", false, criterion_oracle},
        {"A2", "convergence order", false, criterion_order},
        {"A3", "energy monotonicity matrix", false, criterion_energy_matrix},
        {"A4", "height floor u(0) >= U0", true,
         [&] { return criterion_height_floor(sweeps); }},
        {"A5", "nonnegative energy on solutions", true,
         [&] { return criterion_energy_floor(sweeps); }},
        {"A6", "nonexistence threshold stability", true,
         [&] { return criterion_lambda0(sweeps); }},
        {"A7", "proof quantities on the branch", true,
         [&] { return criterion_proof_quantities(sweeps); }},
        {"A8", "operator and reaction hypotheses", false, criterion_hypotheses},
    };

    int failures = 0;
    for (const auto& entry : entries) {
        const double t0 = now_seconds();
        Outcome out;
        if (!sweep_failure.pass && entry.needs_sweeps) {
            out = sweep_failure;
        } else {
            try {
                out = entry.run();
            } catch (const std::exception& e) {
                out.pass = false;
                out.detail = std::string("exception: ") + e.what();
            }
        }
        double dt = now_seconds() - t0;
        if (std::string(entry.label) == "A6") dt = sweeps.seconds;
        std::printf("%s %-36s %s  (%.1f s)  %s\n", entry.label, entry.title,
                    out.pass ? "PASS" : "FAIL", dt, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("acceptance: %d of %zu criteria failed\n", failures, entries.size());
    return failures;
}
