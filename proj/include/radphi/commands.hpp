#pragma once

#include <radphi/bvp.hpp>
#include <radphi/energy.hpp>
#include <radphi/models.hpp>
#include <radphi/serialize.hpp>
#include <radphi/shooting.hpp>
#include <radphi/svg.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace radphi {

// Exit codes shared by every subcommand: 0 success, 1 bad usage or bad
// arguments, 2 model validation or numerical failure, 3 verification found a
// violated law in stored results.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerifyFailed = 3;

struct RunConfig {
    std::string problem_path;
    std::string lambda_spec;           // empty keeps the problem file's lambda
    double a = 0.0;                    // shoot only
    std::string a_range;               // solve/sweep: "lo:hi:n", empty = auto
    int n_steps = 2048;
    double c = 4.0;
    std::string out_dir = ".";
    std::set<std::string> formats = {"csv", "json", "svg"};
};

struct RangeSpec {
    double lo = 0.0, hi = 0.0;
    int n = 0;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + p.string() + "'");
    return out;
}

inline std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

// "v" for a single value, "v1:v2:n" for a linear grid, "log:v1:v2:n" for a
// geometric one.
inline std::vector<double> parse_lambda_spec(const std::string& spec) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() == 1) return {detail::parse_double(parts[0])};
    if (parts.size() == 3)
        return linspace(detail::parse_double(parts[0]), detail::parse_double(parts[1]),
                        detail::parse_int(parts[2]));
    if (parts.size() == 4 && parts[0] == "log")
        return logspace(detail::parse_double(parts[1]), detail::parse_double(parts[2]),
                        detail::parse_int(parts[3]));
    throw std::invalid_argument("bad lambda spec '" + spec +
                                "'; expected v, v1:v2:n, or log:v1:v2:n");
}

inline RangeSpec parse_range(const std::string& spec) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() != 3)
        throw std::invalid_argument("bad range '" + spec + "'; expected lo:hi:n");
    return {detail::parse_double(parts[0]), detail::parse_double(parts[1]),
            detail::parse_int(parts[2])};
}

namespace detail {

inline void check_formats(const std::set<std::string>& formats) {
    for (const auto& f : formats)
        if (f != "csv" && f != "json" && f != "svg")
            throw std::invalid_argument("unknown output format '" + f + "'");
}

// Returns false after printing the failing check names; commands bail out
// with kExitNumerical in that case.
inline bool validated(const ProblemInstance& prob) {
    const ValidationReport rep = validate(prob);
    if (rep.ok()) return true;
    std::cerr << "problem validation failed:\n";
    for (const auto& chk : rep.checks)
        if (!chk.passed && chk.name.rfind("warn.", 0) != 0)
            std::cerr << "  " << chk.name << ": " << chk.detail << '\n';
    return false;
}

inline ProblemInstance load_problem(const RunConfig& cfg) {
    if (cfg.problem_path.empty())
        throw std::invalid_argument("missing --problem file");
    return load_instance_file(cfg.problem_path);
}

inline double single_lambda(const RunConfig& cfg, double fallback) {
    if (cfg.lambda_spec.empty()) return fallback;
    const auto grid = parse_lambda_spec(cfg.lambda_spec);
    if (grid.size() != 1)
        throw std::invalid_argument("this command takes a single lambda value");
    return grid[0];
}

inline RangeSpec height_range(const RunConfig& cfg, const ReactionModel& f) {
    if (!cfg.a_range.empty()) return parse_range(cfg.a_range);
    return {1.01 * f.u0, 1e4 * f.U0, 96};
}

inline void write_profile_svg(const std::filesystem::path& path,
                              const Trajectory& traj, double lambda, double a) {
    SvgPlot plot;
    plot.set_title("u(r), lambda=" + g6(lambda) + ", u(0)=" + g6(a));
    plot.set_xlabel("r");
    plot.set_ylabel("u");
    plot.add_line(traj.r, traj.u, "#1f77b4");
    plot.add_hline(0.0, "#d62728");
    auto out = open_out(path);
    plot.render(out);
}

inline void write_energy_svg(const std::filesystem::path& path, const EnergyTrace& tr,
                             double lambda) {
    SvgPlot plot;
    plot.set_title("E(r), lambda=" + g6(lambda));
    plot.set_xlabel("r");
    plot.set_ylabel("E");
    plot.add_line(tr.r, tr.E, "#1f77b4");
    plot.add_hline(0.0, "#d62728");
    auto out = open_out(path);
    plot.render(out);
}

}  // namespace detail

inline int cmd_shoot(const RunConfig& cfg) {
    detail::check_formats(cfg.formats);
    ProblemInstance prob = detail::load_problem(cfg);
    prob.lambda = detail::single_lambda(cfg, prob.lambda);
    if (!(cfg.a > 0.0)) throw std::invalid_argument("shoot needs --a > 0");
    if (!detail::validated(prob)) return kExitNumerical;

    GridConfig grid;
    grid.n_steps = cfg.n_steps;
    const ShootResult sh = shoot(prob, cfg.a, grid);
    const EnergyTrace tr = energy(prob, sh.traj);
    const EnergyReport er = check_energy_laws(prob, sh.traj);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    if (cfg.formats.count("csv")) {
        auto out = detail::open_out(dir / "trajectory.csv");
        write_trajectory_csv(out, sh.traj, tr.E);
    }
    if (cfg.formats.count("json")) {
        json j;
        j["problem"] = to_json(prob);
        j["a"] = cfg.a;
        j["terminal_u"] = sh.terminal_u;
        j["min_u"] = sh.min_u;
        detail::put_opt(j, "crossing_radius", sh.crossing_radius);
        detail::put_opt(j, "du_at_1", sh.du_at_1);
        j["max_energy_residual"] = energy_derivative_residual(tr);
        j["energy"] = to_json(er);
        j["traj"] = to_json(sh.traj);
        auto out = detail::open_out(dir / "trajectory.json");
        out << j.dump(2) << '\n';
    }
    if (cfg.formats.count("svg")) {
        detail::write_profile_svg(dir / "profile.svg", sh.traj, prob.lambda, cfg.a);
        detail::write_energy_svg(dir / "energy.svg", tr, prob.lambda);
    }

    std::cout << "shoot: lambda=" << detail::g6(prob.lambda) << " a=" << detail::g6(cfg.a)
              << " terminal_u=" << detail::g6(sh.terminal_u)
              << " min_u=" << detail::g6(sh.min_u);
    if (sh.crossing_radius)
        std::cout << " crossing_r=" << detail::g6(*sh.crossing_radius);
    std::cout << '\n';
    return kExitOk;
}

inline int cmd_solve(const RunConfig& cfg) {
    detail::check_formats(cfg.formats);
    ProblemInstance prob = detail::load_problem(cfg);
    prob.lambda = detail::single_lambda(cfg, prob.lambda);
    if (!detail::validated(prob)) return kExitNumerical;

    GridConfig grid;
    grid.n_steps = cfg.n_steps;
    const RangeSpec range = detail::height_range(cfg, prob.reaction);
    const std::vector<SolutionRecord> sols =
        find_solutions(prob, range.lo, range.hi, range.n, grid, cfg.c);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    if (cfg.formats.count("json")) {
        json j;
        j["problem"] = to_json(prob);
        j["lambda"] = prob.lambda;
        json arr = json::array();
        for (const auto& rec : sols) arr.push_back(to_json(rec));
        j["solutions"] = arr;
        auto out = detail::open_out(dir / "solutions.json");
        out << j.dump(2) << '\n';
    }
    if (cfg.formats.count("svg")) {
        for (size_t i = 0; i < sols.size(); ++i) {
            char name[48];
            std::snprintf(name, sizeof(name), "solution_%zu.svg", i);
            detail::write_profile_svg(dir / name, sols[i].traj, prob.lambda, sols[i].a);
        }
    }

    std::cout << "solve: lambda=" << detail::g6(prob.lambda) << " roots=" << sols.size();
    for (const auto& rec : sols)
        std::cout << " a=" << detail::g6(rec.a) << (rec.positive ? "(+)" : "(x)");
    std::cout << '\n';
    return kExitOk;
}

inline int cmd_sweep(const RunConfig& cfg) {
    detail::check_formats(cfg.formats);
    ProblemInstance prob = detail::load_problem(cfg);
    if (!detail::validated(prob)) return kExitNumerical;
    const std::vector<double> lambda_grid = cfg.lambda_spec.empty()
                                                ? std::vector<double>{prob.lambda}
                                                : parse_lambda_spec(cfg.lambda_spec);

    GridConfig grid;
    grid.n_steps = cfg.n_steps;
    const RangeSpec range = detail::height_range(cfg, prob.reaction);
    const SweepReport rep =
        sweep_lambda(prob, lambda_grid, range.lo, range.hi, range.n, grid, cfg.c);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    if (cfg.formats.count("json")) {
        json j;
        j["problem"] = to_json(prob);
        j["sweep"] = to_json(rep);
        auto out = detail::open_out(dir / "sweep.json");
        out << j.dump(2) << '\n';
    }
    if (cfg.formats.count("csv")) {
        auto out = detail::open_out(dir / "branch.csv");
        write_branch_csv(out, rep);
    }
    if (cfg.formats.count("svg")) {
        SvgPlot plot;
        plot.set_title("branch heights vs lambda");
        plot.set_xlabel("lambda");
        plot.set_ylabel("u(0)");
        if (lambda_grid.front() > 0.0 &&
            lambda_grid.back() / lambda_grid.front() >= 10.0)
            plot.set_logx(true);
        std::vector<double> px, py, nx, ny;
        for (const auto& per_lambda : rep.records) {
            for (const auto& rec : per_lambda) {
                (rec.positive ? px : nx).push_back(rec.lambda);
                (rec.positive ? py : ny).push_back(rec.a);
            }
        }
        plot.add_points(std::move(px), std::move(py), "#1f77b4");
        plot.add_points(std::move(nx), std::move(ny), "#2ca02c");
        if (rep.lambda0_estimate) plot.add_vline(*rep.lambda0_estimate, "#d62728");
        auto out = detail::open_out(dir / "bifurcation.svg");
        plot.render(out);
    }

    std::cout << "sweep: " << lambda_grid.size() << " lambda points";
    if (rep.lambda0_estimate)
        std::cout << " lambda0=" << detail::g6(*rep.lambda0_estimate);
    else
        std::cout << " lambda0=none";
    if (rep.lambda0_bracket)
        std::cout << " bracket=[" << detail::g6(rep.lambda0_bracket->first) << ","
                  << detail::g6(rep.lambda0_bracket->second) << "]";
    std::cout << '\n';
    return kExitOk;
}

// Re-derives the structural laws from the stored trajectories instead of
// trusting the flags in the file: height floor u(0) >= U0, energy
// monotonicity, and E(1) >= 0 are hard failures.
inline int cmd_verify(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    const std::filesystem::path sweep_path = dir / "sweep.json";
    const std::filesystem::path sol_path = dir / "solutions.json";

    json j;
    if (std::filesystem::exists(sweep_path)) {
        std::ifstream in(sweep_path);
        j = json::parse(in);
    } else if (std::filesystem::exists(sol_path)) {
        std::ifstream in(sol_path);
        j = json::parse(in);
    } else {
        throw std::invalid_argument("no sweep.json or solutions.json under '" +
                                    dir.string() + "'");
    }

    ProblemInstance base = instance_from_json(j.at("problem"));
    if (!detail::validated(base)) return kExitNumerical;

    std::vector<SolutionRecord> records;
    if (j.contains("sweep")) {
        const SweepReport rep = sweep_from_json(j.at("sweep"));
        for (const auto& per_lambda : rep.records)
            for (const auto& rec : per_lambda) records.push_back(rec);
    } else {
        for (const auto& rj : j.at("solutions")) records.push_back(record_from_json(rj));
    }

    int checked = 0, hard_failures = 0;
    for (const auto& rec : records) {
        if (!rec.positive) continue;
        ++checked;
        ProblemInstance prob = base;
        prob.lambda = rec.lambda;
        const auto [u0_ok, margin] = verify_lemma_u0(prob, rec.traj);
        const EnergyReport er = check_energy_laws(prob, rec.traj);
        const bool hard = !u0_ok || !er.monotone || !er.e1_nonneg;
        if (hard) ++hard_failures;
        std::cout << "record lambda=" << detail::g6(rec.lambda)
                  << " a=" << detail::g6(rec.a) << ": height_floor="
                  << (u0_ok ? "ok" : "FAIL") << " (margin " << detail::g6(margin)
                  << ") energy_monotone=" << (er.monotone ? "ok" : "FAIL")
                  << " boundary_energy=" << (er.e1_nonneg ? "ok" : "FAIL");
        if (!er.nonneg) std::cout << " [warn: interior energy dips negative]";
        std::cout << '\n';
    }
    if (checked == 0) {
        std::cout << "verify: no positive records to check (vacuous pass)\n";
        return kExitOk;
    }
    std::cout << "verify: " << checked << " positive records, " << hard_failures
              << " hard failures\n";
    return hard_failures ? kExitVerifyFailed : kExitOk;
}

}  // namespace radphi
