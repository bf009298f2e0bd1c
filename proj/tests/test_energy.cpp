#include <radphi/energy.hpp>
#include <radphi/oracle.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace radphi;

namespace {

ProblemInstance linear_problem(double lambda) {
    ProblemInstance prob;
    prob.N = 3;
    prob.lambda = lambda;
    prob.phi = make_p_laplacian(2.0);
    prob.reaction = make_linear_shift(1.0);
    return prob;
}

ProblemInstance superlinear_problem(double lambda) {
    ProblemInstance prob;
    prob.N = 3;
    prob.lambda = lambda;
    prob.phi = make_p_laplacian(2.0);
    prob.reaction = make_power_shift(2.0, 1.0);
    return prob;
}

double collared_residual(const ProblemInstance& prob, double a, int n) {
    GridConfig grid;
    grid.n_steps = n;
    return energy_derivative_residual(energy(prob, integrate_ivp(prob, a, grid)));
}

}  // namespace

TEST_CASE("energy starts at lambda F(a) and matches the oracle at r = 1",
          "[energy]") {
    const auto prob = linear_problem(4.0);
    const Trajectory traj = integrate_ivp(prob, 2.0);
    const EnergyTrace tr = energy(prob, traj);
    REQUIRE(tr.E.size() == traj.r.size());
    CHECK(tr.E.front() ==
          Catch::Approx(4.0 * big_f(prob.reaction, 2.0)).epsilon(1e-14));
    // For p = 2 the kinetic part is (u')^2 / 2; close the value at r = 1
    // from the closed-form profile.
    const double u1 = linear_exact(4.0, 2.0, 1.0);
    const double du1 = linear_exact_du(4.0, 2.0, 1.0);
    const double expect = 4.0 * (0.5 * u1 * u1 - u1) + 0.5 * du1 * du1;
    CHECK(tr.E.back() == Catch::Approx(expect).margin(1e-6));
}

TEST_CASE("energy is nonincreasing along profiles", "[energy]") {
    const auto prob = superlinear_problem(1.0);
    for (double a : {1.1, 1.7320508075688772, 5.196152422706632}) {
        const Trajectory traj = integrate_ivp(prob, a);
        const EnergyReport rep = check_energy_laws(prob, traj);
        INFO("a = " << a << " max_violation = " << rep.max_violation);
        CHECK(rep.monotone);
    }
}

TEST_CASE("derivative residual halves at second order under refinement",
          "[energy]") {
    // Linear operator: plain smooth case.
    {
        const auto prob = linear_problem(4.0);
        const double r1 = collared_residual(prob, 2.0, 2048);
        const double r2 = collared_residual(prob, 2.0, 4096);
        INFO("linear residuals " << r1 << " -> " << r2);
        CHECK(r1 / r2 >= 2.8);
    }
    // Degenerate operator (p = 3): the origin collar is what keeps the
    // scalar diagnostic second order; inside the collar the exact energy
    // only has a r^(p/(p-1)) Hoelder cusp at 0.
    {
        ProblemInstance cubic;
        cubic.N = 2;
        cubic.lambda = 1.0;
        cubic.phi = make_p_laplacian(3.0);
        cubic.reaction = make_power_shift(3.0, 8.0);
        const double r1 = collared_residual(cubic, 4.0, 2048);
        const double r2 = collared_residual(cubic, 4.0, 4096);
        INFO("cubic residuals " << r1 << " -> " << r2);
        CHECK(r1 / r2 >= 2.8);
    }
}

TEST_CASE("scalar residual honors the collar", "[energy]") {
    const auto prob = linear_problem(4.0);
    const Trajectory traj = integrate_ivp(prob, 2.0);
    const EnergyTrace tr = energy(prob, traj);
    double manual = 0.0;
    for (size_t i = 1; i + 1 < tr.r.size(); ++i)
        if (tr.r[i] >= 1.0 / 16.0) manual = std::max(manual, tr.dE_residual[i]);
    CHECK(energy_derivative_residual(tr) == manual);
    // A profile that dies inside the collar falls back to all interior rows.
    const auto stiff = superlinear_problem(16384.0);
    const Trajectory short_traj = integrate_ivp(stiff, 1e4 * stiff.reaction.U0);
    REQUIRE(short_traj.r.back() < 1.0 / 16.0);
    const EnergyTrace short_tr = energy(stiff, short_traj);
    double fallback = 0.0;
    for (size_t i = 1; i + 1 < short_tr.r.size(); ++i)
        fallback = std::max(fallback, short_tr.dE_residual[i]);
    CHECK(energy_derivative_residual(short_tr) == fallback);
}

TEST_CASE("boundary sign laws engage on a solution", "[energy]") {
    // Land on the shooting root at lambda = 4 (near 6.135026), so u(1) sits
    // inside the boundary gate and the sign laws are actually exercised.
    const ProblemInstance super = superlinear_problem(4.0);
    GridConfig grid;
    grid.n_steps = 4096;
    double lo = 6.0, hi = 6.3;
    REQUIRE(shoot(super, lo, grid).terminal_u > 0.0);
    REQUIRE(shoot(super, hi, grid).terminal_u < 0.0);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shoot(super, mid, grid).terminal_u > 0.0 ? lo : hi) = mid;
    }
    CHECK(lo == Catch::Approx(6.135026).margin(5e-4));
    const Trajectory traj = integrate_ivp(super, lo, grid);
    REQUIRE(traj.reached_boundary());
    const EnergyReport rep = check_energy_laws(super, traj);
    INFO("u(1) = " << traj.u.back() << " e_min = " << rep.e_min);
    REQUIRE(rep.boundary_checked);
    CHECK(rep.monotone);
    CHECK(rep.nonneg);
    CHECK(rep.e1_nonneg);
    CHECK(rep.e_min >= -1e-3);
}

TEST_CASE("sign laws are vacuous off the boundary", "[energy]") {
    // Positive profile that reaches r = 1 far from u = 0: not a solution,
    // and E(1) < 0 there, so the law must not be applied.
    const auto prob = superlinear_problem(1.0);
    const Trajectory traj = integrate_ivp(prob, 1.1);
    REQUIRE(traj.reached_boundary());
    const EnergyReport rep = check_energy_laws(prob, traj);
    CHECK_FALSE(rep.boundary_checked);
    CHECK(rep.nonneg);      // vacuous
    CHECK(rep.e1_nonneg);   // vacuous
    CHECK(rep.e_terminal < 0.0);
}

TEST_CASE("truncated profiles keep a nonnegative terminal energy", "[energy]") {
    const auto prob = superlinear_problem(1.0);
    const Trajectory traj = integrate_ivp(prob, 25.0);
    REQUIRE(traj.first_crossing());
    const EnergyTrace tr = energy(prob, traj);
    // At the crossing row u = 0 and E reduces to varphi(u')u' - Phi(u') > 0.
    CHECK(tr.E.back() > 0.0);
    const EnergyReport rep = check_energy_laws(prob, traj);
    CHECK(rep.monotone);
    CHECK_FALSE(rep.boundary_checked);
}

TEST_CASE("energy input guards", "[energy]") {
    const auto prob = superlinear_problem(1.0);
    Trajectory tiny;
    tiny.r = {0.0};
    tiny.u = {2.0};
    tiny.du = {0.0};
    tiny.I = {0.0};
    CHECK_THROWS_AS(energy(prob, tiny), std::invalid_argument);
    // Continuation runs carry u < 0 rows, where F is undefined.
    IntegrateOptions opts;
    opts.continue_past_zero = true;
    const Trajectory neg = integrate_ivp(prob, 25.0, {}, opts);
    REQUIRE(neg.min_u_interior() < 0.0);
    CHECK_THROWS_AS(energy(prob, neg), std::invalid_argument);
}

TEST_CASE("turning radius is collared out of the scalar residual", "[energy]") {
    // Same setup as the shooting-side refinement test: one interior sign
    // flip of u', where E is only C^1 and the centered stencil cannot
    // converge.
    ProblemInstance prob;
    prob.N = 2;
    prob.lambda = 1.0;
    prob.phi = make_p_laplacian(3.0);
    prob.reaction = make_power_shift(3.0, 8.0);
    const Trajectory traj = integrate_ivp(prob, 1.1 * prob.reaction.u0);
    const EnergyTrace tr = energy(prob, traj);

    REQUIRE(tr.smooth.size() == tr.r.size());
    size_t flip = 0;
    for (size_t i = 0; i + 1 < traj.du.size(); ++i)
        if (traj.du[i] < 0.0 && traj.du[i + 1] > 0.0) flip = i;
    REQUIRE(flip > 0);
    CHECK(tr.smooth[flip] == 0);
    CHECK(tr.smooth[flip + 1] == 0);
    // Rows well away from the collar stay usable.
    CHECK(tr.smooth[tr.r.size() / 8] == 1);
    CHECK(tr.smooth[tr.r.size() - 2] == 1);

    double manual = 0.0;
    for (size_t i = 1; i + 1 < tr.r.size(); ++i)
        if (tr.r[i] >= 1.0 / 16.0 && tr.smooth[i])
            manual = std::max(manual, tr.dE_residual[i]);
    CHECK(energy_derivative_residual(tr) == manual);
    // The excluded neighborhood really is worse than the kept rows.
    double excluded = 0.0;
    for (size_t i = 1; i + 1 < tr.r.size(); ++i)
        if (!tr.smooth[i]) excluded = std::max(excluded, tr.dE_residual[i]);
    CHECK(excluded > manual);
}
