#pragma once

#include <radphi/pchip.hpp>
#include <radphi/quadrature.hpp>
#include <radphi/roots.hpp>
#include <radphi/util.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace radphi {

// ---------------------------------------------------------------------------
// Quasilinear operator kernel.
//
// varphi is the odd, strictly increasing scalar map s -> phi(s) s driving the
// radial operator (r^{N-1} varphi(u'))'.  Every family satisfies the
// power-law sandwich
//
//     c_hat_2 * s^(p-1) <= varphi(s) <= c_hat_1 * s^(p-1),   s >= 0,
//
// which is what seeds inverse brackets and the energy estimates downstream.
// ---------------------------------------------------------------------------

enum class PhiFamily { p_laplacian, perturbed_p, tabulated };

struct PhiModel {
    PhiFamily family = PhiFamily::p_laplacian;
    double p = 2.0;        // growth exponent, > 1
    double c_hat_1 = 1.0;  // upper sandwich constant
    double c_hat_2 = 1.0;  // lower sandwich constant
    MonotoneCubic table;   // tabulated family: samples of varphi on s >= 0
    double tail = 1.0;     // tabulated family: varphi(s) = tail * s^(p-1) past the table
};

// varphi for s >= 0; the public varphi() below handles the odd extension.
namespace detail {

inline double varphi_nonneg(const PhiModel& m, double s) {
    switch (m.family) {
        case PhiFamily::p_laplacian:
            return std::pow(s, m.p - 1.0);
        case PhiFamily::perturbed_p:
            // phi(s) = s^(p-2) * (1 + 1/(2(1+s))), so varphi = phi(s)*s.
            return std::pow(s, m.p - 1.0) * (1.0 + 0.5 / (1.0 + s));
        case PhiFamily::tabulated:
            if (s <= m.table.x_max()) return s == 0.0 ? 0.0 : m.table(s);
            return m.tail * std::pow(s, m.p - 1.0);
    }
    return 0.0;
}

}  // namespace detail

inline double varphi(const PhiModel& m, double s) {
    if (s == 0.0) return 0.0;
    const double v = detail::varphi_nonneg(m, std::abs(s));
    return s > 0.0 ? v : -v;
}

// Inverse of varphi.  Closed form for the pure power family; otherwise a
// Brent solve seeded by the sandwich bracket
//   (|w|/c_hat_1)^(1/(p-1)) <= varphi^{-1}(|w|) <= (|w|/c_hat_2)^(1/(p-1)).
inline double varphi_inverse(const PhiModel& m, double w) {
    if (w == 0.0) return 0.0;
    const double aw = std::abs(w);
    double x;
    if (m.family == PhiFamily::p_laplacian) {
        x = std::pow(aw, 1.0 / (m.p - 1.0));
    } else {
        const double q = 1.0 / (m.p - 1.0);
        double lo = std::pow(aw / m.c_hat_1, q) * (1.0 - 1e-9);
        double hi = std::pow(aw / m.c_hat_2, q) * (1.0 + 1e-9);
        auto g = [&](double s) { return detail::varphi_nonneg(m, s) - aw; };
        double glo, ghi;
        if (!expand_bracket(g, lo, hi, glo, ghi, 80)) {
            std::ostringstream os;
            os << "varphi_inverse: no bracket for w = " << w << " (last interval ["
               << lo << ", " << hi << "], g = (" << glo << ", " << ghi << "))";
            throw numerical_error(os.str());
        }
        x = brent(g, lo, hi, 1e-15 * (1.0 + hi)).x;
    }
    return w > 0.0 ? x : -x;
}

// Antiderivative Phi(t) = int_0^|t| varphi(s) ds (even in t).
inline double big_phi(const PhiModel& m, double t) {
    const double at = std::abs(t);
    if (at == 0.0) return 0.0;
    switch (m.family) {
        case PhiFamily::p_laplacian:
            return std::pow(at, m.p) / m.p;
        case PhiFamily::perturbed_p: {
            // t^p/p plus (1/2) int_0^t s^(p-1)/(1+s) ds.  No closed form for
            // general p; peel 1/(1+s) = 1 - s + s^2/(1+s) off analytically so
            // the leftover integrand s^(p+1)/(1+s) is smooth at 0 (the raw
            // s^(p-1) kink starves the adaptive rule for p near 1).
            auto rem = [&](double s) { return std::pow(s, m.p + 1.0) / (1.0 + s); };
            const double crude = std::pow(at, m.p) / m.p;
            const double head = crude - std::pow(at, m.p + 1.0) / (m.p + 1.0);
            const double tol = 1e-12 * std::max(1.0, crude);
            return crude + 0.5 * (head + adaptive_simpson(rem, 0.0, at, tol));
        }
        case PhiFamily::tabulated: {
            const double s_end = m.table.x_max();
            if (at <= s_end) return m.table.integral_from_min(at);
            const double head = m.table.integral_from_min(s_end);
            const double tail = m.tail / m.p * (std::pow(at, m.p) - std::pow(s_end, m.p));
            return head + tail;
        }
    }
    return 0.0;
}

inline PhiModel make_p_laplacian(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("make_p_laplacian: need p > 1");
    PhiModel m;
    m.family = PhiFamily::p_laplacian;
    m.p = p;
    m.c_hat_1 = m.c_hat_2 = 1.0;
    return m;
}

inline PhiModel make_perturbed_p(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("make_perturbed_p: need p > 1");
    PhiModel m;
    m.family = PhiFamily::perturbed_p;
    m.p = p;
    // The multiplier 1 + 1/(2(1+s)) lives in (1, 3/2].
    m.c_hat_1 = 1.5;
    m.c_hat_2 = 1.0;
    return m;
}

inline PhiModel make_tabulated_phi(std::vector<double> s, std::vector<double> values,
                                   double p) {
    if (!(p > 1.0)) throw std::invalid_argument("make_tabulated_phi: need p > 1");
    if (s.size() < 4)
        throw std::invalid_argument("make_tabulated_phi: need at least 4 samples");
    if (s.front() != 0.0 || values.front() != 0.0)
        throw std::invalid_argument("make_tabulated_phi: table must start at (0, 0)");
    for (size_t i = 0; i + 1 < values.size(); ++i)
        if (!(values[i] < values[i + 1]))
            throw std::invalid_argument("make_tabulated_phi: samples must be strictly increasing");
    PhiModel m;
    m.family = PhiFamily::tabulated;
    m.p = p;
    m.table = MonotoneCubic(std::move(s), std::move(values));
    m.tail = m.table.values().back() / std::pow(m.table.x_max(), p - 1.0);
    // Fit the sandwich constants from a dense sweep of the table cells plus
    // the tail coefficient.
    double lo = m.tail, hi = m.tail;
    const auto& kn = m.table.knots();
    for (size_t i = 0; i + 1 < kn.size(); ++i) {
        for (int j = (i == 0 ? 1 : 0); j <= 64; ++j) {
            const double x = kn[i] + (kn[i + 1] - kn[i]) * j / 64.0;
            const double ratio = m.table(x) / std::pow(x, p - 1.0);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    if (!(lo > 0.0))
        throw std::invalid_argument("make_tabulated_phi: table violates the power sandwich");
    m.c_hat_1 = hi;
    m.c_hat_2 = lo;
    return m;
}

// ---------------------------------------------------------------------------
// Reaction term.
//
// f is nondecreasing with f(0) < 0 and a unique zero u0; its antiderivative
// F has a unique positive zero U0 > u0.  The growth constant k satisfies
// f(t) >= k t^alpha for t >= (u0 + U0)/2.  All three are computed once at
// construction.
// ---------------------------------------------------------------------------

enum class ReactionFamily { power_shift, linear_shift, tabulated };

struct ReactionModel {
    ReactionFamily family = ReactionFamily::power_shift;
    double alpha = 2.0;  // growth exponent of the k t^alpha lower bound
    double beta = 1.0;   // shift, f(0) = -beta
    MonotoneCubic table; // tabulated family: samples of f on [0, T]
    // Cached at construction:
    double u0 = 0.0;     // unique zero of f
    double U0 = 0.0;     // unique positive zero of F
    double k = 0.0;      // growth constant
};

// f(u).  Negative arguments only occur when an IVP is continued past the
// boundary zero; the power family uses the odd-power extension
// sign(u)|u|^alpha - beta there so the formula stays real.
inline double reaction(const ReactionModel& m, double u) {
    switch (m.family) {
        case ReactionFamily::power_shift: {
            const double pw = std::pow(std::abs(u), m.alpha);
            return (u >= 0.0 ? pw : -pw) - m.beta;
        }
        case ReactionFamily::linear_shift:
            return u - m.beta;
        case ReactionFamily::tabulated:
            return m.table(u);  // linear extrapolation outside the table
    }
    return 0.0;
}

// df/du, consumed by the integrator's endpoint-corrected flux quadrature.
// The power family with alpha < 1 blows up at u = 0; callers guard for that.
inline double reaction_prime(const ReactionModel& m, double u) {
    switch (m.family) {
        case ReactionFamily::power_shift:
            if (m.alpha == 1.0) return 1.0;
            return m.alpha * std::pow(std::abs(u), m.alpha - 1.0);
        case ReactionFamily::linear_shift:
            return 1.0;
        case ReactionFamily::tabulated:
            return m.table.derivative(u);
    }
    return 0.0;
}

// F(u) = int_0^u f.  Only meaningful on u >= 0.
inline double big_f(const ReactionModel& m, double u) {
    if (u < 0.0)
        throw std::invalid_argument("big_f: argument must be nonnegative");
    switch (m.family) {
        case ReactionFamily::power_shift:
            return std::pow(u, m.alpha + 1.0) / (m.alpha + 1.0) - m.beta * u;
        case ReactionFamily::linear_shift:
            return 0.5 * u * u - m.beta * u;
        case ReactionFamily::tabulated: {
            const double lo = m.table.x_min();
            if (lo != 0.0)
                throw std::invalid_argument("big_f: tabulated reaction must start at u = 0");
            return m.table.integral_from_min(u);
        }
    }
    return 0.0;
}

// Unique zero of f.  Bracket [0, hi] grows geometrically until f(hi) >= 0.
inline double find_u0(const ReactionModel& m) {
    const double f0 = reaction(m, 0.0);
    if (!(f0 < 0.0))
        throw std::invalid_argument("find_u0: reaction must satisfy f(0) < 0");
    double hi = 1.0;
    int rounds = 0;
    while (reaction(m, hi) < 0.0) {
        hi *= 2.0;
        if (++rounds > 60)
            throw numerical_error("find_u0: f stays negative out to 2^60, no zero");
    }
    if (reaction(m, hi) == 0.0) return hi;
    return bisect([&](double t) { return reaction(m, t); }, 0.0, hi, 1e-15).x;
}

// Unique positive zero of F, strictly above u0.
inline double find_U0(const ReactionModel& m) {
    const double u0 = m.u0 > 0.0 ? m.u0 : find_u0(m);
    double hi = std::max(2.0 * u0, 1.0);
    int rounds = 0;
    while (big_f(m, hi) < 0.0) {
        hi *= 2.0;
        if (++rounds > 60)
            throw numerical_error("find_U0: F stays negative out to 2^60, no zero");
    }
    if (big_f(m, hi) == 0.0) return hi;
    return bisect([&](double t) { return big_f(m, t); }, u0, hi, 1e-15).x;
}

// Largest k with f(t) >= k t^alpha on [(u0+U0)/2, T_max].  The infimum is
// taken over a log grid that contains the left endpoint exactly; for the
// builtin families the minimum sits there, so the grid value is exact.
inline double growth_constant(const ReactionModel& m, double t_max_factor = 1e3) {
    const double t_left = 0.5 * (m.u0 + m.U0);
    double t_right = t_max_factor * m.U0;
    if (m.family == ReactionFamily::tabulated)
        t_right = std::min(t_right, m.table.x_max());
    if (!(t_right > t_left))
        throw std::invalid_argument("growth_constant: empty sample interval");
    double k = reaction(m, t_left) / std::pow(t_left, m.alpha);
    for (double t : logspace(t_left, t_right, 2048))
        k = std::min(k, reaction(m, t) / std::pow(t, m.alpha));
    if (!(k > 0.0))
        throw numerical_error("growth_constant: no positive k, growth hypothesis fails");
    return k;
}

namespace detail {

inline void finalize_reaction(ReactionModel& m) {
    m.u0 = find_u0(m);
    m.U0 = find_U0(m);
    m.k = growth_constant(m);
}

}  // namespace detail

inline ReactionModel make_power_shift(double alpha, double beta = 1.0) {
    if (!(alpha > 0.0)) throw std::invalid_argument("make_power_shift: need alpha > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("make_power_shift: need beta > 0");
    ReactionModel m;
    m.family = ReactionFamily::power_shift;
    m.alpha = alpha;
    m.beta = beta;
    detail::finalize_reaction(m);
    return m;
}

inline ReactionModel make_linear_shift(double beta = 1.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("make_linear_shift: need beta > 0");
    ReactionModel m;
    m.family = ReactionFamily::linear_shift;
    m.alpha = 1.0;
    m.beta = beta;
    detail::finalize_reaction(m);
    return m;
}

inline ReactionModel make_tabulated_reaction(std::vector<double> u,
                                             std::vector<double> values,
                                             double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("make_tabulated_reaction: need alpha > 0");
    if (u.size() < 4)
        throw std::invalid_argument("make_tabulated_reaction: need at least 4 samples");
    if (u.front() != 0.0)
        throw std::invalid_argument("make_tabulated_reaction: table must start at u = 0");
    if (!(values.front() < 0.0))
        throw std::invalid_argument("make_tabulated_reaction: need f(0) < 0");
    for (size_t i = 0; i + 1 < values.size(); ++i)
        if (values[i] > values[i + 1])
            throw std::invalid_argument("make_tabulated_reaction: samples must be nondecreasing");
    if (!(values.back() > 0.0))
        throw std::invalid_argument("make_tabulated_reaction: f must turn positive inside the table");
    ReactionModel m;
    m.family = ReactionFamily::tabulated;
    m.alpha = alpha;
    m.beta = -values.front();
    m.table = MonotoneCubic(std::move(u), std::move(values));
    detail::finalize_reaction(m);
    return m;
}

// ---------------------------------------------------------------------------
// Problem instance and hypothesis validation.
// ---------------------------------------------------------------------------

struct ProblemInstance {
    int N = 3;            // space dimension, >= 1
    double lambda = 1.0;  // bifurcation parameter, > 0
    PhiModel phi;
    ReactionModel reaction;
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    // Aggregate verdict; entries named "warn.*" are advisory and excluded.
    bool ok() const {
        for (const auto& c : checks)
            if (!c.passed && c.name.rfind("warn.", 0) != 0) return false;
        return true;
    }

    const ValidationCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

// Checks every structural hypothesis the solver leans on.  Hard checks gate
// the aggregate verdict; "warn.*" entries record advisory findings.
inline ValidationReport validate(const ProblemInstance& prob) {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        rep.checks.push_back({name, ok, detail});
    };
    const PhiModel& phi = prob.phi;
    const ReactionModel& f = prob.reaction;

    add("instance.dimension", prob.N >= 1, "N = " + std::to_string(prob.N));
    add("instance.lambda_positive", prob.lambda > 0.0,
        "lambda = " + detail::fmt_g(prob.lambda));
    add("phi.p_gt_1", phi.p > 1.0, "p = " + detail::fmt_g(phi.p));

    // Sample grid for the operator checks: zero plus a wide log sweep.
    const auto sgrid = logspace(1e-6, 1e3, 241);

    {
        bool odd = true;
        for (double s : sgrid)
            if (varphi(phi, -s) != -varphi(phi, s)) { odd = false; break; }
        add("phi.odd", odd, odd ? "varphi(-s) == -varphi(s) on sample grid"
                                : "odd symmetry broken");
    }
    {
        bool mono = varphi(phi, sgrid.front()) > 0.0;
        double prev = 0.0, at = 0.0;
        for (double s : sgrid) {
            const double v = varphi(phi, s);
            if (!(v > prev)) { mono = false; at = s; break; }
            prev = v;
        }
        add("phi.monotone", mono,
            mono ? "strictly increasing on sample grid"
                 : "not increasing near s = " + detail::fmt_g(at));
    }
    {
        bool ok = true;
        double worst = 0.0, at = 0.0;
        double fit_lo = 1e300, fit_hi = 0.0;
        for (double s : sgrid) {
            const double v = varphi(phi, s);
            const double ref = std::pow(s, phi.p - 1.0);
            const double ratio = v / ref;
            fit_lo = std::min(fit_lo, ratio);
            fit_hi = std::max(fit_hi, ratio);
            const double slack = 1e-6 * ref * std::max(phi.c_hat_1, 1.0);
            const double excess =
                std::max(phi.c_hat_2 * ref - v, v - phi.c_hat_1 * ref) - slack;
            if (excess > worst) { worst = excess; at = s; }
        }
        ok = worst <= 0.0;
        std::string det = "fit [" + detail::fmt_g(fit_lo) + ", " + detail::fmt_g(fit_hi) +
                          "], declared [" + detail::fmt_g(phi.c_hat_2) + ", " +
                          detail::fmt_g(phi.c_hat_1) + "]";
        if (!ok) det += ", violated near s = " + detail::fmt_g(at);
        add("phi.power_sandwich", ok, det);
    }
    {
        bool ok = true;
        double at = 0.0;
        for (double t : logspace(1e-3, 50.0, 61)) {
            const double lhs = big_phi(phi, t);
            const double rhs = t * varphi(phi, t);
            if (lhs > rhs * (1.0 + 1e-12) + 1e-14) { ok = false; at = t; break; }
        }
        add("phi.antiderivative_bound", ok,
            ok ? "Phi(t) <= t*varphi(t) on sample grid"
               : "violated near t = " + detail::fmt_g(at));
    }

    add("reaction.f0_negative", reaction(f, 0.0) < 0.0,
        "f(0) = " + detail::fmt_g(reaction(f, 0.0)));
    if (!(f.u0 > 0.0) || !(f.U0 > f.u0)) {
        // Hand-assembled model that skipped the factory; the remaining
        // reaction checks all lean on the cached zeros.
        add("reaction.cached_zeros", false,
            "u0 = " + detail::fmt_g(f.u0) + ", U0 = " + detail::fmt_g(f.U0) +
                " (expected 0 < u0 < U0; build models through the factories)");
        return rep;
    }
    {
        bool mono = true;
        double at = 0.0;
        const auto ugrid = linspace(0.0, 4.0 * std::max(f.U0, 1.0), 257);
        for (size_t i = 0; i + 1 < ugrid.size(); ++i) {
            if (reaction(f, ugrid[i + 1]) < reaction(f, ugrid[i]) - 1e-12) {
                mono = false;
                at = ugrid[i];
                break;
            }
        }
        add("reaction.nondecreasing", mono,
            mono ? "nondecreasing on sample grid"
                 : "decreasing near u = " + detail::fmt_g(at));
    }
    {
        const double fu0 = reaction(f, f.u0);
        bool ok = std::abs(fu0) <= 1e-10 * (1.0 + f.beta) && f.u0 > 0.0;
        // Sign pattern: strictly negative left of u0, positive right of it.
        for (double s : linspace(0.0, f.u0 * (1.0 - 1e-9), 33))
            if (!(reaction(f, s) < 0.0)) { ok = false; break; }
        for (double s : linspace(f.u0 * (1.0 + 1e-6), 4.0 * f.U0, 33))
            if (!(reaction(f, s) > 0.0)) { ok = false; break; }
        add("reaction.unique_zero", ok,
            "u0 = " + detail::fmt_g(f.u0) + ", f(u0) = " + detail::fmt_g(fu0));
    }
    {
        const double Fv = big_f(f, f.U0);
        const bool ok = f.U0 > f.u0 && std::abs(Fv) <= 1e-9 * (1.0 + f.beta * f.U0);
        add("reaction.F_zero", ok,
            "U0 = " + detail::fmt_g(f.U0) + ", F(U0) = " + detail::fmt_g(Fv));
    }
    {
        bool ok = f.k > 0.0;
        double at = 0.0;
        double t_right = 1e3 * f.U0;
        if (f.family == ReactionFamily::tabulated)
            t_right = std::min(t_right, f.table.x_max());
        for (double t : logspace(0.5 * (f.u0 + f.U0), t_right, 513)) {
            if (reaction(f, t) < f.k * std::pow(t, f.alpha) * (1.0 - 1e-6)) {
                ok = false;
                at = t;
                break;
            }
        }
        add("reaction.growth_lower_bound", ok,
            ok ? "k = " + detail::fmt_g(f.k)
               : "f(t) < k t^alpha near t = " + detail::fmt_g(at));
    }
    {
        // Subcritical window alpha in (p-1, p*-1) with p* the Sobolev
        // exponent; advisory because the solver itself does not need it.
        const double p = phi.p;
        double pstar_m1 = std::numeric_limits<double>::infinity();
        if (prob.N > p) pstar_m1 = (prob.N * p) / (prob.N - p) - 1.0;
        const bool inside = f.alpha > p - 1.0 && f.alpha < pstar_m1;
        add("warn.alpha_window", inside,
            "alpha = " + detail::fmt_g(f.alpha) + ", window (" + detail::fmt_g(p - 1.0) +
                ", " + detail::fmt_g(pstar_m1) + ")");
    }
    if (phi.family == PhiFamily::tabulated || f.family == ReactionFamily::tabulated) {
        add("warn.tabulated_interpolant", true,
            "tabulated data interpolated by a monotone cubic; derivatives are "
            "approximate between knots");
    }
    return rep;
}

}  // namespace radphi
